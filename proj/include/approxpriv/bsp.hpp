#pragma once

// Binary space partitions of disjoint axis-parallel rectangles with at most
// four fragments per rectangle, and their conversion to dissection protocols.

#include "approxpriv/protocol.hpp"

#include <optional>
#include <tuple>
#include <vector>

namespace approxpriv {

struct Fragment {
    std::size_t rect = 0;  // index into the input rectangle list
    HyperRect box;
};

struct BspNode {
    int axis = -1;  // -1 for leaf cells
    int cut_after = 0;
    std::size_t low = 0;
    std::size_t high = 0;
    HyperRect cell;
    std::optional<Fragment> fragment;

    bool is_leaf() const noexcept { return axis < 0; }
};

class BspTree {
public:
    BspTree() = default;
    BspTree(std::vector<BspNode> nodes, std::size_t root, HyperRect bounds, std::size_t rect_count)
        : nodes_(std::move(nodes)), root_(root), bounds_(std::move(bounds)), rect_count_(rect_count)
    {}

    const std::vector<BspNode>& nodes() const noexcept { return nodes_; }
    const BspNode& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t root() const noexcept { return root_; }
    const HyperRect& bounds() const noexcept { return bounds_; }
    std::size_t rect_count() const noexcept { return rect_count_; }

    // Size of a BSP is its number of leaves.
    std::size_t leaf_count() const
    {
        std::size_t n = 0;
        for (const auto& node : nodes_) n += node.is_leaf();
        return n;
    }

    std::size_t height() const { return depth(root_); }

private:
    std::size_t depth(std::size_t i) const
    {
        const auto& n = nodes_[i];
        return n.is_leaf() ? 0 : 1 + std::max(depth(n.low), depth(n.high));
    }

    std::vector<BspNode> nodes_;
    std::size_t root_ = 0;
    HyperRect bounds_;
    std::size_t rect_count_ = 0;
};

struct FragmentReport {
    std::vector<std::size_t> counts;           // t_i per input rectangle
    std::vector<std::uint64_t> fragment_area;  // summed fragment volume per rectangle
    std::size_t max_count = 0;
};

inline FragmentReport fragment_report(const BspTree& bsp)
{
    FragmentReport rep;
    rep.counts.assign(bsp.rect_count(), 0);
    rep.fragment_area.assign(bsp.rect_count(), 0);
    for (const auto& n : bsp.nodes()) {
        if (!n.is_leaf() || !n.fragment) continue;
        ++rep.counts[n.fragment->rect];
        rep.fragment_area[n.fragment->rect] += n.fragment->box.volume();
    }
    for (auto c : rep.counts) rep.max_count = std::max(rep.max_count, c);
    return rep;
}

class BspBoundExceeded : public InternalError {
public:
    using InternalError::InternalError;
};

namespace detail {

class BspBuilder {
public:
    BspBuilder(const std::vector<HyperRect>& rects, const HyperRect& bounds) : rects_(rects), bounds_(bounds)
    {
        counts_.assign(rects.size(), 1);
    }

    BspTree build()
    {
        std::vector<Fragment> frags;
        for (std::size_t i = 0; i < rects_.size(); ++i) frags.push_back({i, rects_[i]});
        const auto root = rec(bounds_, std::move(frags));
        return BspTree(std::move(nodes_), root, bounds_, rects_.size());
    }

private:
    struct Choice {
        int axis = -1;
        int m = 0;
        // Lexicographic score; lower is better.
        std::tuple<std::size_t, std::size_t, int, int> score{};
    };

    static bool crosses(const Fragment& f, int a, int m) { return f.box[a].lo <= m && m < f.box[a].hi; }

    // Both sides of the cut must receive some fragment material.
    static bool splits_set(const std::vector<Fragment>& frags, int a, int m)
    {
        bool low = false, high = false;
        for (const auto& f : frags) {
            low = low || f.box[a].lo <= m;
            high = high || f.box[a].hi > m;
        }
        return low && high;
    }

    std::optional<Choice> free_cut(const HyperRect& cell, const std::vector<Fragment>& frags) const
    {
        for (int a = 0; a < cell.dims(); ++a) {
            for (int m = cell[a].lo; m < cell[a].hi; ++m) {
                bool clean = true;
                for (const auto& f : frags)
                    if (crosses(f, a, m)) {
                        clean = false;
                        break;
                    }
                if (clean && splits_set(frags, a, m)) return Choice{a, m, {}};
            }
        }
        return std::nullopt;
    }

    // Cut along a fragment side. Prefers cuts whose crossed rectangles are
    // least fragmented so far, then fewest crossings, then lowest axis and
    // coordinate.
    Choice side_cut(const HyperRect& cell, const std::vector<Fragment>& frags) const
    {
        std::optional<Choice> best;
        auto consider = [&](int a, int m) {
            if (m < cell[a].lo || m >= cell[a].hi) return;
            if (!splits_set(frags, a, m)) return;
            std::size_t crossed = 0, worst = 0;
            for (const auto& f : frags)
                if (crosses(f, a, m)) {
                    ++crossed;
                    worst = std::max(worst, counts_[f.rect] + 1);
                }
            Choice c{a, m, {worst, crossed, a, m}};
            if (!best || c.score < best->score) best = c;
        };
        for (const auto& f : frags)
            for (int a = 0; a < cell.dims(); ++a) {
                consider(a, f.box[a].lo - 1);
                consider(a, f.box[a].hi);
            }
        if (!best) throw InternalError("no separating cut among disjoint fragments");
        return *best;
    }

    std::size_t rec(const HyperRect& cell, std::vector<Fragment> frags)
    {
        if (frags.size() <= 1) {
            BspNode leaf;
            leaf.cell = cell;
            if (!frags.empty()) leaf.fragment = std::move(frags.front());
            nodes_.push_back(std::move(leaf));
            return nodes_.size() - 1;
        }
        Choice c;
        if (auto f = free_cut(cell, frags))
            c = *f;
        else
            c = side_cut(cell, frags);

        std::vector<Fragment> low, high;
        for (auto& f : frags) {
            if (f.box[c.axis].hi <= c.m) {
                low.push_back(std::move(f));
            } else if (f.box[c.axis].lo > c.m) {
                high.push_back(std::move(f));
            } else {
                auto [l, h] = f.box.split(c.axis, c.m);
                low.push_back({f.rect, l});
                high.push_back({f.rect, h});
                if (++counts_[f.rect] > 4)
                    throw BspBoundExceeded("rectangle " + std::to_string(f.rect) +
                                           " split into more than 4 fragments by the BSP builder");
            }
        }
        auto [lcell, hcell] = cell.split(c.axis, c.m);
        const auto li = rec(lcell, std::move(low));
        const auto hi = rec(hcell, std::move(high));
        BspNode node;
        node.axis = c.axis;
        node.cut_after = c.m;
        node.low = li;
        node.high = hi;
        node.cell = cell;
        nodes_.push_back(std::move(node));
        return nodes_.size() - 1;
    }

    const std::vector<HyperRect>& rects_;
    HyperRect bounds_;
    std::vector<std::size_t> counts_;
    std::vector<BspNode> nodes_;
};

}  // namespace detail

/// BSP over disjoint rectangles inside `bounds` (a tiling or any disjoint
/// set). Free cuts are taken whenever one exists; otherwise the cut runs along
/// a rectangle side. Every input rectangle ends in at most 4 leaves or the
/// build throws BspBoundExceeded.
inline BspTree build_bsp(const std::vector<HyperRect>& rects, const HyperRect& bounds)
{
    if (bounds.dims() != 2) throw ValidationError("BSP construction is only supported in two dimensions");
    for (std::size_t i = 0; i < rects.size(); ++i) {
        if (rects[i].dims() != 2 || !rects[i].valid()) throw ValidationError("rectangle " + std::to_string(i) + " is malformed");
        if (!bounds.contains(rects[i])) throw ValidationError("rectangle " + std::to_string(i) + " lies outside the bounds");
        for (std::size_t j = i + 1; j < rects.size(); ++j)
            if (rects[i].intersects(rects[j]))
                throw ValidationError("rectangles " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
    auto bsp = detail::BspBuilder(rects, bounds).build();
    const auto rep = fragment_report(bsp);
    for (std::size_t i = 0; i < rects.size(); ++i) {
        if (rep.counts[i] > 4) throw BspBoundExceeded("rectangle " + std::to_string(i) + " has more than 4 fragments");
        if (rep.fragment_area[i] != rects[i].volume())
            throw InternalError("fragments of rectangle " + std::to_string(i) + " do not cover it");
    }
    return bsp;
}

/// Each BSP cut becomes a cut by the party owning that axis; leaves take the
/// table's value on their cell.
inline ProtocolTree bsp_to_protocol(const BspTree& bsp, const FunctionTable& table)
{
    if (!(bsp.bounds() == table.shape().bounds())) throw ValidationError("BSP bounds differ from the table grid");
    ProtocolTree tree;
    auto rec = [&](auto&& self, std::size_t idx) -> std::size_t {
        const auto& n = bsp.node(idx);
        if (n.is_leaf()) {
            if (!table.is_monochromatic(n.cell))
                throw ProtocolError(idx, "BSP leaf cell is not monochromatic; the BSP was not built from this table's tiling");
            std::vector<int> lo;
            for (const auto& iv : n.cell.axes) lo.push_back(iv.lo);
            return tree.add_leaf(table.symbol(table.at(lo)));
        }
        const auto l = self(self, n.low);
        const auto h = self(self, n.high);
        return tree.add_cut(n.axis, n.cut_after, l, h);
    };
    rec(rec, bsp.root());
    return tree;
}

/// Rectangles a BSP protocol should separate: the ideal tiles when the table
/// is a tiling, otherwise the strip decomposition of each region.
inline std::vector<HyperRect> bsp_input_rects(const RegionMap& ideal)
{
    const auto info = tiling_info(ideal);
    std::vector<HyperRect> rects;
    if (info.is_tiling) {
        for (const auto& r : ideal.regions()) rects.push_back(r.bbox);
        return rects;
    }
    return decompose_regions(ideal).all_fragments();
}

inline ProtocolTree bsp_protocol(const FunctionTable& table, RegionSemantics semantics = RegionSemantics::connected)
{
    const auto ideal = ideal_partition(table, semantics);
    return bsp_to_protocol(build_bsp(bsp_input_rects(ideal), table.shape().bounds()), table);
}

}  // namespace approxpriv
