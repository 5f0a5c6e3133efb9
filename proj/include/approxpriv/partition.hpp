#pragma once

// Ideal monochromatic partitions, the tiling test and rectangle
// decomposition of non-rectangular regions.

#include "approxpriv/grid.hpp"

#include <deque>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

namespace approxpriv {

// connected: maximal monochromatic components under edge adjacency (2d
// neighbours, no diagonals). level_sets: one region per output value.
enum class RegionSemantics { connected, level_sets };

struct RegionInfo {
    std::uint32_t value = 0;
    std::uint64_t size = 0;
    HyperRect bbox;
    bool is_rectangle = false;
    std::size_t first_cell = 0;
};

class RegionMap {
public:
    RegionMap() = default;

    /// Relabels arbitrary per-cell labels so that ids follow row-major
    /// first-cell order, and fills per-region statistics.
    static RegionMap from_labels(const GridShape& shape, const std::vector<std::uint32_t>& labels,
                                 const std::vector<std::uint32_t>& cell_values, RegionSemantics semantics)
    {
        RegionMap m;
        m.shape_ = shape;
        m.semantics_ = semantics;
        m.region_of_.assign(shape.cells(), 0);
        std::vector<std::int64_t> remap;
        std::vector<int> coords(shape.dims());
        for (std::size_t cell = 0; cell < shape.cells(); ++cell) {
            const auto lab = labels[cell];
            if (lab >= remap.size()) remap.resize(lab + 1, -1);
            if (remap[lab] < 0) {
                remap[lab] = static_cast<std::int64_t>(m.regions_.size());
                RegionInfo info;
                info.value = cell_values[cell];
                info.first_cell = cell;
                shape.unflat(cell, coords);
                info.bbox = HyperRect::cell(coords);
                m.regions_.push_back(info);
            }
            const auto id = static_cast<std::uint32_t>(remap[lab]);
            m.region_of_[cell] = id;
            auto& info = m.regions_[id];
            if (info.value != cell_values[cell]) throw ValidationError("region label spans two output values");
            ++info.size;
            shape.unflat(cell, coords);
            for (int a = 0; a < shape.dims(); ++a) {
                info.bbox[a].lo = std::min(info.bbox[a].lo, coords[a]);
                info.bbox[a].hi = std::max(info.bbox[a].hi, coords[a]);
            }
        }
        for (auto& info : m.regions_) info.is_rectangle = info.size == info.bbox.volume();
        return m;
    }

    const GridShape& shape() const noexcept { return shape_; }
    RegionSemantics semantics() const noexcept { return semantics_; }
    std::size_t region_count() const noexcept { return regions_.size(); }
    std::uint32_t region_at(std::size_t cell) const { return region_of_[cell]; }
    const std::vector<std::uint32_t>& labels() const noexcept { return region_of_; }
    const RegionInfo& region(std::uint32_t id) const { return regions_.at(id); }
    const std::vector<RegionInfo>& regions() const noexcept { return regions_; }

    std::vector<std::vector<std::size_t>> cells_by_region() const
    {
        std::vector<std::vector<std::size_t>> out(regions_.size());
        for (std::size_t cell = 0; cell < region_of_.size(); ++cell) out[region_of_[cell]].push_back(cell);
        return out;
    }

    /// Per-region values written back as a table-shaped array.
    std::vector<std::uint32_t> cell_values() const
    {
        std::vector<std::uint32_t> v(region_of_.size());
        for (std::size_t cell = 0; cell < v.size(); ++cell) v[cell] = regions_[region_of_[cell]].value;
        return v;
    }

    std::vector<std::uint64_t> size_multiset() const
    {
        std::vector<std::uint64_t> s;
        for (const auto& r : regions_) s.push_back(r.size);
        std::sort(s.begin(), s.end());
        return s;
    }

private:
    GridShape shape_;
    RegionSemantics semantics_ = RegionSemantics::connected;
    std::vector<std::uint32_t> region_of_;
    std::vector<RegionInfo> regions_;
};

inline RegionMap ideal_partition(const FunctionTable& table, RegionSemantics semantics = RegionSemantics::connected)
{
    const auto& shape = table.shape();
    const auto& vals = table.grid_values();
    if (semantics == RegionSemantics::level_sets) return RegionMap::from_labels(shape, vals, vals, semantics);

    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label(shape.cells(), kUnset);
    std::uint32_t next = 0;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < shape.cells(); ++start) {
        if (label[start] != kUnset) continue;
        label[start] = next;
        queue.push_back(start);
        while (!queue.empty()) {
            const auto cell = queue.front();
            queue.pop_front();
            for (int a = 0; a < shape.dims(); ++a) {
                const int c = shape.coord(cell, a);
                const auto stride = shape.stride(a);
                if (c > 0 && label[cell - stride] == kUnset && vals[cell - stride] == vals[cell]) {
                    label[cell - stride] = next;
                    queue.push_back(cell - stride);
                }
                if (c + 1 < shape.side() && label[cell + stride] == kUnset && vals[cell + stride] == vals[cell]) {
                    label[cell + stride] = next;
                    queue.push_back(cell + stride);
                }
            }
        }
        ++next;
    }
    return RegionMap::from_labels(shape, label, vals, semantics);
}

struct TilingInfo {
    bool is_tiling = false;
    std::size_t r_f = 0;  // meaningful when is_tiling
    std::optional<std::uint32_t> witness;  // a non-rectangular region otherwise
    // Max rectangles per region from the strip decomposition (d = 2 only).
    std::optional<std::size_t> delta_upper;
};

struct RegionFragments {
    std::uint32_t region = 0;
    std::vector<HyperRect> fragments;
};

struct Decomposition {
    std::vector<RegionFragments> regions;
    std::size_t delta_upper = 0;

    std::vector<HyperRect> all_fragments() const
    {
        std::vector<HyperRect> out;
        for (const auto& r : regions) out.insert(out.end(), r.fragments.begin(), r.fragments.end());
        return out;
    }
};

/// Maximal horizontal strips: per-row runs along axis 1, with identical runs
/// in consecutive rows merged into one rectangle.
inline Decomposition decompose_regions(const RegionMap& map)
{
    const auto& shape = map.shape();
    if (shape.dims() != 2) throw ValidationError("rectangle decomposition is only supported for two parties");
    const int n = shape.side();
    Decomposition out;
    out.regions.resize(map.region_count());
    for (std::uint32_t id = 0; id < map.region_count(); ++id) out.regions[id].region = id;

    // Open strips per region, keyed by column run; extended row by row.
    struct Open {
        std::uint32_t region;
        int clo, chi, rlo, rhi;
    };
    std::vector<Open> open;
    auto close_stale = [&](int row) {
        std::vector<Open> keep;
        for (const auto& o : open) {
            if (o.rhi == row) {
                keep.push_back(o);
            } else {
                out.regions[o.region].fragments.push_back(HyperRect({{o.rlo, o.rhi}, {o.clo, o.chi}}));
            }
        }
        open.swap(keep);
    };
    for (int r = 0; r < n; ++r) {
        int c = 0;
        while (c < n) {
            const auto id = map.region_at(static_cast<std::size_t>(r) * n + c);
            int e = c;
            while (e + 1 < n && map.region_at(static_cast<std::size_t>(r) * n + e + 1) == id) ++e;
            bool extended = false;
            for (auto& o : open) {
                if (o.region == id && o.clo == c && o.chi == e && o.rhi == r - 1) {
                    o.rhi = r;
                    extended = true;
                    break;
                }
            }
            if (!extended) open.push_back({id, c, e, r, r});
            c = e + 1;
        }
        close_stale(r);
    }
    close_stale(n);  // flushes everything
    for (auto& rf : out.regions) {
        std::sort(rf.fragments.begin(), rf.fragments.end(), [](const HyperRect& a, const HyperRect& b) {
            return std::tie(a[0].lo, a[1].lo) < std::tie(b[0].lo, b[1].lo);
        });
        out.delta_upper = std::max(out.delta_upper, rf.fragments.size());
    }
    return out;
}

inline TilingInfo tiling_info(const RegionMap& map)
{
    TilingInfo info;
    info.is_tiling = true;
    for (std::uint32_t id = 0; id < map.region_count(); ++id) {
        if (!map.region(id).is_rectangle) {
            info.is_tiling = false;
            info.witness = id;
            break;
        }
    }
    if (info.is_tiling) info.r_f = map.region_count();
    if (map.shape().dims() == 2)
        info.delta_upper = decompose_regions(map).delta_upper;
    else if (info.is_tiling)
        info.delta_upper = 1;
    return info;
}

/// The regions of `ref` (computed on `ref_table`) followed through a change
/// of permutations: each input keeps its region, and `target` lays the inputs
/// out in its own order.
inline RegionMap transport_partition(const RegionMap& ref, const FunctionTable& ref_table, const FunctionTable& target)
{
    if (!(ref_table.shape() == target.shape())) throw ValidationError("tables differ in shape");
    if (ref_table.raw_values() != target.raw_values()) throw ValidationError("tables compute different functions");
    std::vector<std::uint32_t> label(target.cells());
    for (std::size_t cell = 0; cell < target.cells(); ++cell)
        label[cell] = ref.region_at(ref_table.cell_of_input(target.input_of_cell(cell)));
    return RegionMap::from_labels(target.shape(), label, target.grid_values(), ref.semantics());
}

/// Number of diagonally touching cell pairs that share a value but lie in
/// different connected regions. Non-zero means "maximal region" depends on
/// the adjacency convention for this table.
inline std::size_t diagonal_contacts(const FunctionTable& table, const RegionMap& map)
{
    const auto& shape = table.shape();
    std::size_t count = 0;
    std::vector<int> c(shape.dims()), o(shape.dims());
    for (std::size_t cell = 0; cell < shape.cells(); ++cell) {
        shape.unflat(cell, c);
        for (int a = 0; a < shape.dims(); ++a) {
            for (int b = a + 1; b < shape.dims(); ++b) {
                for (int db : {-1, 1}) {
                    o = c;
                    o[a] += 1;
                    o[b] += db;
                    if (o[a] >= shape.side() || o[b] < 0 || o[b] >= shape.side()) continue;
                    const auto other = shape.flat(o);
                    if (table.at(cell) == table.at(other) && map.region_at(cell) != map.region_at(other)) ++count;
                }
            }
        }
    }
    return count;
}

}  // namespace approxpriv
