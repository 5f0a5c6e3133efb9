#pragma once

// Function grids: permutations per party, hyper-rectangles over grid
// coordinates, the permuted value table and input distributions.

#include "approxpriv/error.hpp"
#include "approxpriv/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace approxpriv {

struct Limits {
    int max_k_2d = 8;
    int max_k_3d = 4;
    // Any other party count: cap on d*k.
    int max_total_bits = 16;
    // Exhaustive optimal-protocol search.
    int max_dp_k_2d = 5;
    int max_dp_k_3d = 3;
    int max_dp_total_bits = 9;

    void check_table(int d, int k) const
    {
        if (d < 2) throw ValidationError("party count must be at least 2, got " + std::to_string(d));
        if (k < 1) throw ValidationError("bits per party must be at least 1, got " + std::to_string(k));
        const bool ok = d == 2 ? k <= max_k_2d : d == 3 ? k <= max_k_3d : d * k <= max_total_bits;
        if (!ok)
            throw LimitError("grid with d=" + std::to_string(d) + ", k=" + std::to_string(k) +
                             " exceeds the configured size limit");
    }

    void check_dp(int d, int k) const
    {
        const bool ok = d == 2 ? k <= max_dp_k_2d : d == 3 ? k <= max_dp_k_3d : d * k <= max_dp_total_bits;
        if (!ok)
            throw LimitError("optimal search over d=" + std::to_string(d) + ", k=" + std::to_string(k) +
                             " exceeds the configured limit");
    }
};

/// Ordering of one party's 2^k inputs along its grid axis.
/// `input_at(p)` is the input placed at position p.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<std::uint32_t> order) : order_(std::move(order)), position_(order_.size())
    {
        std::vector<bool> seen(order_.size(), false);
        for (std::size_t p = 0; p < order_.size(); ++p) {
            const auto in = order_[p];
            if (in >= order_.size())
                throw ValidationError("permutation entry " + std::to_string(in) + " out of range");
            if (seen[in]) throw ValidationError("permutation repeats input " + std::to_string(in));
            seen[in] = true;
            position_[in] = static_cast<std::uint32_t>(p);
        }
    }

    static Permutation identity(std::size_t n)
    {
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        return Permutation(std::move(order));
    }

    std::size_t size() const noexcept { return order_.size(); }
    std::uint32_t input_at(std::size_t position) const { return order_[position]; }
    std::uint32_t position_of(std::size_t input) const { return position_[input]; }
    const std::vector<std::uint32_t>& order() const noexcept { return order_; }
    bool is_identity() const
    {
        for (std::size_t p = 0; p < order_.size(); ++p)
            if (order_[p] != p) return false;
        return true;
    }

    Permutation inverse() const { return Permutation(position_); }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.order_ == b.order_; }

private:
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> position_;
};

struct Interval {
    int lo = 0;
    int hi = 0;

    int length() const noexcept { return hi - lo + 1; }
    bool contains(int x) const noexcept { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Closed integer box, one interval per axis.
struct HyperRect {
    std::vector<Interval> axes;

    HyperRect() = default;
    explicit HyperRect(std::vector<Interval> a) : axes(std::move(a)) {}

    static HyperRect full(int d, int side) { return HyperRect(std::vector<Interval>(d, Interval{0, side - 1})); }
    static HyperRect cell(std::span<const int> coords)
    {
        HyperRect r;
        for (int c : coords) r.axes.push_back({c, c});
        return r;
    }

    int dims() const noexcept { return static_cast<int>(axes.size()); }
    const Interval& operator[](int a) const { return axes[a]; }
    Interval& operator[](int a) { return axes[a]; }

    std::uint64_t volume() const
    {
        std::uint64_t v = 1;
        for (const auto& iv : axes) v *= static_cast<std::uint64_t>(std::max(0, iv.length()));
        return v;
    }

    bool valid() const
    {
        return std::all_of(axes.begin(), axes.end(), [](const Interval& iv) { return iv.lo <= iv.hi; });
    }

    bool contains(std::span<const int> coords) const
    {
        for (int a = 0; a < dims(); ++a)
            if (!axes[a].contains(coords[a])) return false;
        return true;
    }

    bool contains(const HyperRect& o) const
    {
        for (int a = 0; a < dims(); ++a)
            if (o.axes[a].lo < axes[a].lo || o.axes[a].hi > axes[a].hi) return false;
        return true;
    }

    bool intersects(const HyperRect& o) const
    {
        for (int a = 0; a < dims(); ++a)
            if (o.axes[a].hi < axes[a].lo || axes[a].hi < o.axes[a].lo) return false;
        return true;
    }

    std::optional<HyperRect> intersection(const HyperRect& o) const
    {
        HyperRect r = *this;
        for (int a = 0; a < dims(); ++a) {
            r.axes[a].lo = std::max(axes[a].lo, o.axes[a].lo);
            r.axes[a].hi = std::min(axes[a].hi, o.axes[a].hi);
            if (r.axes[a].lo > r.axes[a].hi) return std::nullopt;
        }
        return r;
    }

    // Split after coordinate m on axis a; both halves non-empty.
    std::pair<HyperRect, HyperRect> split(int a, int m) const
    {
        HyperRect low = *this, high = *this;
        low.axes[a].hi = m;
        high.axes[a].lo = m + 1;
        return {low, high};
    }

    friend bool operator==(const HyperRect&, const HyperRect&) = default;
};

/// Dense d-dimensional grid of side 2^k, row-major with axis 0 most significant.
class GridShape {
public:
    GridShape() = default;
    GridShape(int d, int k) : d_(d), k_(k), side_(std::size_t{1} << k), strides_(d)
    {
        std::size_t s = 1;
        for (int a = d - 1; a >= 0; --a) {
            strides_[a] = s;
            s *= side_;
        }
        cells_ = s;
    }

    int dims() const noexcept { return d_; }
    int bits() const noexcept { return k_; }
    int side() const noexcept { return static_cast<int>(side_); }
    std::size_t cells() const noexcept { return cells_; }
    std::size_t stride(int a) const { return strides_[a]; }

    std::size_t flat(std::span<const int> coords) const
    {
        std::size_t idx = 0;
        for (int a = 0; a < d_; ++a) idx += static_cast<std::size_t>(coords[a]) * strides_[a];
        return idx;
    }

    void unflat(std::size_t idx, std::span<int> coords) const
    {
        for (int a = 0; a < d_; ++a) {
            coords[a] = static_cast<int>(idx / strides_[a]);
            idx %= strides_[a];
        }
    }

    int coord(std::size_t idx, int a) const { return static_cast<int>((idx / strides_[a]) % side_); }

    HyperRect bounds() const { return HyperRect::full(d_, side()); }

    /// Calls fn(flat_index) for every cell of `r`, in row-major order.
    template <class Fn>
    void for_each_cell(const HyperRect& r, Fn&& fn) const
    {
        std::vector<int> c(d_);
        for (int a = 0; a < d_; ++a) c[a] = r[a].lo;
        while (true) {
            fn(flat(c));
            int a = d_ - 1;
            while (a >= 0 && c[a] == r[a].hi) {
                c[a] = r[a].lo;
                --a;
            }
            if (a < 0) return;
            ++c[a];
        }
    }

    friend bool operator==(const GridShape& a, const GridShape& b) { return a.d_ == b.d_ && a.k_ == b.k_; }

private:
    int d_ = 0;
    int k_ = 0;
    std::size_t side_ = 0;
    std::size_t cells_ = 0;
    std::vector<std::size_t> strides_;
};

/// A d-party function f on k-bit inputs, viewed through one permutation per
/// party. `raw` is indexed by input tuple (same row-major encoding as grid
/// cells); `at(cell)` reads the permuted grid.
class FunctionTable {
public:
    FunctionTable() = default;

    FunctionTable(int d, int k, std::vector<std::string> alphabet, std::vector<std::uint32_t> raw,
                  std::vector<Permutation> perms, const Limits& limits = {})
        : alphabet_(std::move(alphabet)), raw_(std::move(raw)), perms_(std::move(perms))
    {
        limits.check_table(d, k);
        shape_ = GridShape(d, k);
        if (raw_.size() != shape_.cells())
            throw ValidationError("table needs " + std::to_string(shape_.cells()) + " values, got " +
                                  std::to_string(raw_.size()));
        for (auto v : raw_)
            if (v >= alphabet_.size()) throw ValidationError("value id " + std::to_string(v) + " not in alphabet");
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            for (std::size_t j = i + 1; j < alphabet_.size(); ++j)
                if (alphabet_[i] == alphabet_[j]) throw ValidationError("duplicate alphabet symbol '" + alphabet_[i] + "'");
        if (perms_.empty())
            perms_.assign(d, Permutation::identity(shape_.side()));
        if (static_cast<int>(perms_.size()) != d)
            throw ValidationError("expected " + std::to_string(d) + " permutations, got " + std::to_string(perms_.size()));
        for (const auto& p : perms_)
            if (p.size() != static_cast<std::size_t>(shape_.side()))
                throw ValidationError("permutation length " + std::to_string(p.size()) + " != 2^k = " +
                                      std::to_string(shape_.side()));
        grid_.resize(shape_.cells());
        for (std::size_t cell = 0; cell < shape_.cells(); ++cell) grid_[cell] = raw_[input_of_cell(cell)];
    }

    const GridShape& shape() const noexcept { return shape_; }
    int dims() const noexcept { return shape_.dims(); }
    int bits() const noexcept { return shape_.bits(); }
    int side() const noexcept { return shape_.side(); }
    std::size_t cells() const noexcept { return shape_.cells(); }

    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    const std::string& symbol(std::uint32_t id) const { return alphabet_.at(id); }
    std::optional<std::uint32_t> find_symbol(const std::string& s) const
    {
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            if (alphabet_[i] == s) return static_cast<std::uint32_t>(i);
        return std::nullopt;
    }

    const std::vector<Permutation>& perms() const noexcept { return perms_; }
    const std::vector<std::uint32_t>& raw_values() const noexcept { return raw_; }
    const std::vector<std::uint32_t>& grid_values() const noexcept { return grid_; }

    std::uint32_t at(std::size_t cell) const { return grid_[cell]; }
    std::uint32_t at(std::span<const int> coords) const { return grid_[shape_.flat(coords)]; }
    std::uint32_t raw(std::size_t input) const { return raw_[input]; }

    std::size_t input_of_cell(std::size_t cell) const
    {
        std::size_t input = 0;
        for (int a = 0; a < dims(); ++a)
            input += static_cast<std::size_t>(perms_[a].input_at(shape_.coord(cell, a))) * shape_.stride(a);
        return input;
    }

    std::size_t cell_of_input(std::size_t input) const
    {
        std::size_t cell = 0;
        for (int a = 0; a < dims(); ++a)
            cell += static_cast<std::size_t>(perms_[a].position_of(shape_.coord(input, a))) * shape_.stride(a);
        return cell;
    }

    /// Same function, different orderings.
    FunctionTable with_perms(std::vector<Permutation> perms) const
    {
        FunctionTable t = *this;
        if (static_cast<int>(perms.size()) != dims()) throw ValidationError("wrong number of permutations");
        for (const auto& p : perms)
            if (p.size() != static_cast<std::size_t>(side())) throw ValidationError("wrong permutation length");
        t.perms_ = std::move(perms);
        for (std::size_t cell = 0; cell < t.cells(); ++cell) t.grid_[cell] = t.raw_[t.input_of_cell(cell)];
        return t;
    }

    bool is_monochromatic(const HyperRect& r) const
    {
        bool mono = true;
        const auto first = grid_[shape_.flat(std::vector<int>(lows(r)))];
        shape_.for_each_cell(r, [&](std::size_t c) { mono = mono && grid_[c] == first; });
        return mono;
    }

private:
    static std::vector<int> lows(const HyperRect& r)
    {
        std::vector<int> c;
        for (const auto& iv : r.axes) c.push_back(iv.lo);
        return c;
    }

    GridShape shape_;
    std::vector<std::string> alphabet_;
    std::vector<std::uint32_t> raw_;
    std::vector<Permutation> perms_;
    std::vector<std::uint32_t> grid_;
};

/// Builds a table from a function on input tuples. Symbols are interned in
/// order of first appearance over inputs in row-major order.
inline FunctionTable build_table(int d, int k, const std::function<std::string(std::span<const std::uint32_t>)>& f,
                                 std::vector<Permutation> perms = {}, const Limits& limits = {})
{
    limits.check_table(d, k);
    const GridShape shape(d, k);
    std::vector<std::string> alphabet;
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<std::uint32_t> raw(shape.cells());
    std::vector<int> coords(d);
    std::vector<std::uint32_t> inputs(d);
    for (std::size_t i = 0; i < shape.cells(); ++i) {
        shape.unflat(i, coords);
        for (int a = 0; a < d; ++a) inputs[a] = static_cast<std::uint32_t>(coords[a]);
        auto sym = f(inputs);
        auto [it, inserted] = ids.try_emplace(sym, static_cast<std::uint32_t>(alphabet.size()));
        if (inserted) alphabet.push_back(sym);
        raw[i] = it->second;
    }
    return FunctionTable(d, k, std::move(alphabet), std::move(raw), std::move(perms), limits);
}

/// Same, with a fixed alphabet and a function returning ids into it.
inline FunctionTable build_table(int d, int k, std::vector<std::string> alphabet,
                                 const std::function<std::uint32_t(std::span<const std::uint32_t>)>& f,
                                 std::vector<Permutation> perms = {}, const Limits& limits = {})
{
    limits.check_table(d, k);
    const GridShape shape(d, k);
    std::vector<std::uint32_t> raw(shape.cells());
    std::vector<int> coords(d);
    std::vector<std::uint32_t> inputs(d);
    for (std::size_t i = 0; i < shape.cells(); ++i) {
        shape.unflat(i, coords);
        for (int a = 0; a < d; ++a) inputs[a] = static_cast<std::uint32_t>(coords[a]);
        raw[i] = f(inputs);
    }
    return FunctionTable(d, k, std::move(alphabet), std::move(raw), std::move(perms), limits);
}

enum class DistributionKind { uniform, c_approximate, arbitrary };

/// Probability per input tuple (not per grid cell: weights travel with the
/// inputs when permutations change).
class Distribution {
public:
    Distribution() = default;

    static Distribution uniform(int d, int k)
    {
        const GridShape shape(d, k);
        Distribution dist;
        dist.shape_ = shape;
        dist.kind_ = DistributionKind::uniform;
        dist.weights_.assign(shape.cells(), make_rational(Integer(1), Integer(static_cast<unsigned long>(shape.cells()))));
        return dist;
    }

    static Distribution from_weights(int d, int k, std::vector<Rational> weights,
                                     DistributionKind kind = DistributionKind::arbitrary, Rational c = 0);

    const GridShape& shape() const noexcept { return shape_; }
    DistributionKind kind() const noexcept { return kind_; }
    const Rational& c() const noexcept { return c_; }
    const Rational& weight(std::size_t input) const { return weights_[input]; }
    const std::vector<Rational>& weights() const noexcept { return weights_; }

    /// Weights laid out in the table's grid order.
    std::vector<Rational> grid_weights(const FunctionTable& table) const
    {
        if (!(table.shape() == shape_)) throw ValidationError("distribution shape does not match table");
        std::vector<Rational> out(table.cells());
        for (std::size_t cell = 0; cell < table.cells(); ++cell) out[cell] = weights_[table.input_of_cell(cell)];
        return out;
    }

    std::string describe() const
    {
        switch (kind_) {
        case DistributionKind::uniform: return "uniform";
        case DistributionKind::c_approximate: return "capprox:" + to_string(c_);
        case DistributionKind::arbitrary: return "weights";
        }
        return "?";
    }

private:
    GridShape shape_;
    DistributionKind kind_ = DistributionKind::uniform;
    Rational c_ = 0;
    std::vector<Rational> weights_;
};

struct CApproxCheck {
    bool ok = true;
    // Inputs holding the largest and smallest weight.
    std::size_t max_input = 0;
    std::size_t min_input = 0;
    Rational spread;
    Rational bound;
};

/// Checks max |w - w'| <= c * 2^{-dk}. The witnessing pair is the argmax/argmin.
inline CApproxCheck validate_c_approx(const Distribution& dist, const Rational& c)
{
    CApproxCheck res;
    const auto& w = dist.weights();
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] > w[res.max_input]) res.max_input = i;
        if (w[i] < w[res.min_input]) res.min_input = i;
    }
    res.spread = w[res.max_input] - w[res.min_input];
    res.bound = c / Rational(Integer(static_cast<unsigned long>(w.size())));
    res.ok = res.spread <= res.bound;
    return res;
}

inline Distribution Distribution::from_weights(int d, int k, std::vector<Rational> weights, DistributionKind kind,
                                               Rational c)
{
    Distribution dist;
    dist.shape_ = GridShape(d, k);
    if (weights.size() != dist.shape_.cells())
        throw ValidationError("distribution needs " + std::to_string(dist.shape_.cells()) + " weights, got " +
                              std::to_string(weights.size()));
    Rational total = 0;
    for (auto& w : weights) {
        w.canonicalize();
        if (w < 0) throw ValidationError("negative probability weight " + to_string(w));
        total += w;
    }
    if (total != 1) throw ValidationError("weights sum to " + to_string(total) + ", not 1");
    dist.weights_ = std::move(weights);
    dist.kind_ = kind;
    dist.c_ = c;
    if (kind == DistributionKind::c_approximate) {
        if (c < 0 || c >= 1) throw ValidationError("c must lie in [0,1), got " + to_string(c));
        const auto chk = validate_c_approx(dist, c);
        if (!chk.ok)
            throw ValidationError("weights are not " + to_string(c) + "-approximately uniform: spread " +
                                  to_string(chk.spread) + " > " + to_string(chk.bound));
    }
    return dist;
}

/// Seeded c-approximate uniform distribution: w_i = (1 + c*u_i) / N with
/// rational offsets u_i in [-1/2, 1/2] summing to zero.
inline Distribution random_c_approx_distribution(int d, int k, const Rational& c, std::uint64_t seed)
{
    const GridShape shape(d, k);
    const auto n = shape.cells();
    std::mt19937_64 rng(seed);
    constexpr long kScale = 1000;
    std::uniform_int_distribution<long> pick(-kScale, kScale);
    std::vector<long> e(n);
    long sum = 0;
    for (auto& v : e) {
        v = pick(rng);
        sum += v;
    }
    // u_i = (e_i - mean) / (4*kScale) lies in [-1/2, 1/2].
    const Rational mean = make_rational(sum, static_cast<long>(n));
    const Rational inv_n = make_rational(1, static_cast<long>(n));
    std::vector<Rational> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational u = (Rational(e[i]) - mean) / Rational(4 * kScale);
        w[i] = (1 + c * u) * inv_n;
        w[i].canonicalize();
    }
    return Distribution::from_weights(d, k, std::move(w), DistributionKind::c_approximate, c);
}

}  // namespace approxpriv
