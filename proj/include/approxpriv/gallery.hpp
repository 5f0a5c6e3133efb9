#pragma once

// Reproducible function instances: the textbook functions (equality, set
// covering, parity, greater-than), the bisection counter-examples f1/f2, the
// 4x4 pinwheel with no perfectly private protocol, nested pinwheel frames,
// the three-party construction and random tilings for property tests.

#include "approxpriv/partition.hpp"

#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace approxpriv {

struct GallerySpec {
    std::string name;
    int k = 1;
    int g = 1;               // f2 only
    std::uint64_t seed = 0;  // random entries only
};

struct GalleryInstance {
    FunctionTable table;
    // Intended tiles, in grid coordinates, for tiling constructions.
    std::optional<std::vector<HyperRect>> tiles;
};

inline const std::vector<std::string>& gallery_names()
{
    static const std::vector<std::string> names{
        "equality", "set_covering", "f1",     "f2",           "notile",       "hless", "paterson_yao_3d",
        "parity",   "greater_than", "constant", "random_boolean_tiling", "random_guillotine_tiling"};
    return names;
}

/// Contribution recurrence for bisection on set covering:
/// g(0,j,k) = 3^k, g(i,j,k) = 2^{2j-1} - 2^{j-1} + 2 g(i-1,j,k) + g(i-1,i-1,k).
inline Integer setcov_recurrence(int i, int j, int k)
{
    if (i < 0 || j < 0 || i > k || j > k) throw ValidationError("setcov_recurrence needs 0 <= i, j <= k");
    std::map<std::pair<int, int>, Integer> memo;
    auto rec = [&](auto&& self, int ii, int jj) -> Integer {
        if (ii == 0) return pow_int(3, static_cast<unsigned long>(k));
        if (auto it = memo.find({ii, jj}); it != memo.end()) return it->second;
        // 2^{2j-1} - 2^{j-1} = (4^j - 2^j) / 2, an integer for every j >= 0.
        Integer first = (pow_int(4, jj) - pow_int(2, jj)) / 2;
        Integer v = first + 2 * self(self, ii - 1, jj) + self(self, ii - 1, ii - 1);
        memo.emplace(std::make_pair(ii, jj), v);
        return v;
    };
    return rec(rec, i, j);
}

namespace detail {

inline FunctionTable boolean_table(int k, const std::function<bool(std::uint32_t, std::uint32_t)>& f,
                                   std::vector<Permutation> perms = {})
{
    return build_table(2, k, {"0", "1"}, [&](std::span<const std::uint32_t> in) { return f(in[0], in[1]) ? 1u : 0u; },
                       std::move(perms));
}

/// Table whose grid under identity permutations carries the given tiles, with
/// tile i taking symbol symbols[colors[i]].
inline FunctionTable table_from_tiles(int d, int k, const std::vector<HyperRect>& tiles,
                                      const std::vector<std::uint32_t>& colors, std::vector<std::string> symbols)
{
    const GridShape shape(d, k);
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> raw(shape.cells(), kUnset);
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        shape.for_each_cell(tiles[t], [&](std::size_t c) {
            if (raw[c] != kUnset) throw InternalError("generated tiles overlap");
            raw[c] = colors[t];
        });
    }
    for (auto v : raw)
        if (v == kUnset) throw InternalError("generated tiles leave a gap");
    return FunctionTable(d, k, std::move(symbols), std::move(raw), {});
}

inline std::vector<std::string> index_symbols(std::size_t n)
{
    std::vector<std::string> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(std::to_string(i));
    return s;
}

/// Tile adjacency: tiles a, b share a (d-1)-dimensional face.
inline std::vector<std::vector<std::size_t>> tile_neighbours(const GridShape& shape, const std::vector<HyperRect>& tiles)
{
    std::vector<std::size_t> owner(shape.cells(), 0);
    for (std::size_t t = 0; t < tiles.size(); ++t) shape.for_each_cell(tiles[t], [&](std::size_t c) { owner[c] = t; });
    std::vector<std::vector<std::size_t>> nb(tiles.size());
    for (std::size_t c = 0; c < shape.cells(); ++c)
        for (int a = 0; a < shape.dims(); ++a) {
            if (shape.coord(c, a) + 1 >= shape.side()) continue;
            const auto o = owner[c + shape.stride(a)];
            if (o != owner[c]) {
                nb[owner[c]].push_back(o);
                nb[o].push_back(owner[c]);
            }
        }
    for (auto& v : nb) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return nb;
}

/// Smallest-available-color greedy coloring in tile order.
inline std::vector<std::uint32_t> greedy_coloring(const std::vector<std::vector<std::size_t>>& nb)
{
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> color(nb.size(), kUnset);
    for (std::size_t t = 0; t < nb.size(); ++t) {
        std::vector<bool> taken(nb.size() + 1, false);
        for (auto o : nb[t])
            if (color[o] != kUnset) taken[color[o]] = true;
        std::uint32_t c = 0;
        while (taken[c]) ++c;
        color[t] = c;
    }
    return color;
}

inline void guillotine(const HyperRect& block, std::mt19937_64& rng, double stop, int depth, std::vector<HyperRect>& out)
{
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> axes;
    for (int a = 0; a < block.dims(); ++a)
        if (block[a].length() > 1) axes.push_back(a);
    if (axes.empty() || (depth > 0 && coin(rng) < stop)) {
        out.push_back(block);
        return;
    }
    const int a = axes[std::uniform_int_distribution<std::size_t>(0, axes.size() - 1)(rng)];
    const int m = std::uniform_int_distribution<int>(block[a].lo, block[a].hi - 1)(rng);
    auto [l, h] = block.split(a, m);
    guillotine(l, rng, stop, depth + 1, out);
    guillotine(h, rng, stop, depth + 1, out);
}

inline GalleryInstance hless(int k)
{
    if (k <= 0 || k % 2 != 0) throw ValidationError("hless needs an even k > 0, got k=" + std::to_string(k));
    const int n = 1 << k;
    const int half = n / 2;
    std::vector<HyperRect> tiles;
    auto rect = [](int r0, int r1, int c0, int c1) { return HyperRect({{r0, r1}, {c0, c1}}); };
    for (int level = 1; level <= half - 1; ++level) {
        const int s = level - 1, e = n - level;
        if (level == 1) {
            // Each frame side of length n-1 is split into n/2 cells at its
            // low-coordinate end and n/2 - 1 cells after it, so opposite
            // sides break at different coordinates.
            tiles.push_back(rect(s, s, s + 1, s + half));
            tiles.push_back(rect(s, s, s + half + 1, e));
            tiles.push_back(rect(s, s + half - 1, s, s));
            tiles.push_back(rect(s + half, e - 1, s, s));
            tiles.push_back(rect(e, e, s, s + half - 1));
            tiles.push_back(rect(e, e, s + half, e - 1));
            tiles.push_back(rect(s + 1, s + half, e, e));
            tiles.push_back(rect(s + half + 1, e, e, e));
        } else {
            tiles.push_back(rect(s, s, s + 1, e));
            tiles.push_back(rect(s, e - 1, s, s));
            tiles.push_back(rect(e, e, s, e - 1));
            tiles.push_back(rect(s + 1, e, e, e));
        }
    }
    tiles.push_back(rect(half - 1, half, half - 1, half));
    const GridShape shape(2, k);
    const auto colors = greedy_coloring(tile_neighbours(shape, tiles));
    const auto ncolors = *std::max_element(colors.begin(), colors.end()) + 1;
    return {table_from_tiles(2, k, tiles, colors, index_symbols(ncolors)), tiles};
}

inline GalleryInstance paterson_yao_3d(int k)
{
    const int n = 1 << k;
    const GridShape shape(3, k);
    std::vector<HyperRect> tiles;
    auto box = [](Interval x, Interval y, Interval z) { return HyperRect({x, y, z}); };
    const Interval all{0, n - 1};
    for (int y = 0; y < n; y += 2)
        for (int z = 0; z < n; z += 2) tiles.push_back(box(all, {y, y}, {z, z}));
    for (int x = 0; x < n; x += 2)
        for (int z = 1; z < n; z += 2) tiles.push_back(box({x, x}, all, {z, z}));
    for (int x = 1; x < n; x += 2)
        for (int y = 1; y < n; y += 2) tiles.push_back(box({x, x}, {y, y}, all));
    std::vector<bool> covered(shape.cells(), false);
    for (const auto& t : tiles) shape.for_each_cell(t, [&](std::size_t c) { covered[c] = true; });
    std::vector<int> c(3);
    for (std::size_t cell = 0; cell < shape.cells(); ++cell) {
        if (covered[cell]) continue;
        shape.unflat(cell, c);
        tiles.push_back(HyperRect::cell(c));
    }
    std::vector<std::uint32_t> colors(tiles.size());
    std::iota(colors.begin(), colors.end(), 0u);
    return {table_from_tiles(3, k, tiles, colors, index_symbols(tiles.size())), tiles};
}

inline std::vector<HyperRect> tiles_of(const FunctionTable& t)
{
    std::vector<HyperRect> tiles;
    const auto map = ideal_partition(t);
    for (const auto& r : map.regions()) tiles.push_back(r.bbox);
    return tiles;
}

}  // namespace detail

/// Inputs with even popcount first, each group in increasing order.
inline Permutation parity_sorted_permutation(int k)
{
    std::vector<std::uint32_t> order;
    for (int parity = 0; parity < 2; ++parity)
        for (std::uint32_t x = 0; x < (1u << k); ++x)
            if (std::popcount(x) % 2 == parity) order.push_back(x);
    return Permutation(std::move(order));
}

/// Random guillotine tiling with every tile carrying its own value.
inline GalleryInstance random_guillotine_tiling(int k, std::uint64_t seed, double stop = 0.3)
{
    std::mt19937_64 rng(seed);
    std::vector<HyperRect> tiles;
    detail::guillotine(HyperRect::full(2, 1 << k), rng, stop, 0, tiles);
    std::vector<std::uint32_t> colors(tiles.size());
    std::iota(colors.begin(), colors.end(), 0u);
    return {detail::table_from_tiles(2, k, tiles, colors, detail::index_symbols(tiles.size())), tiles};
}

/// Random two-valued table whose ideal partition is a tiling. Draws random
/// guillotine partitions with random colors and keeps the first whose
/// same-colored merges still leave rectangles.
inline GalleryInstance random_boolean_tiling(int k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<HyperRect> tiles;
        detail::guillotine(HyperRect::full(2, 1 << k), rng, 0.35, 0, tiles);
        std::vector<std::uint32_t> colors(tiles.size());
        for (auto& c : colors) c = static_cast<std::uint32_t>(rng() & 1u);
        auto table = detail::table_from_tiles(2, k, tiles, colors, {"0", "1"});
        if (tiling_info(ideal_partition(table)).is_tiling) return {table, detail::tiles_of(table)};
    }
    throw InternalError("could not draw a Boolean tiling");
}

inline GalleryInstance make(const GallerySpec& spec)
{
    const int k = spec.k;
    if (k < 1) throw ValidationError("k must be at least 1");
    const std::uint32_t n = 1u << k;
    const auto& name = spec.name;
    if (name == "equality") return {detail::boolean_table(k, [](auto x, auto y) { return x == y; }), std::nullopt};
    if (name == "set_covering")
        return {detail::boolean_table(k, [n](auto x, auto y) { return (x | y) == n - 1; }), std::nullopt};
    if (name == "greater_than") return {detail::boolean_table(k, [](auto x, auto y) { return x > y; }), std::nullopt};
    if (name == "constant") return {detail::boolean_table(k, [](auto, auto) { return false; }), std::vector{HyperRect::full(2, static_cast<int>(n))}};
    if (name == "parity") {
        const auto p = parity_sorted_permutation(k);
        auto t = detail::boolean_table(
            k, [](auto x, auto y) { return (std::popcount(x) + std::popcount(y)) % 2 == 1; }, {p, p});
        return {t, detail::tiles_of(t)};
    }
    if (name == "f1") {
        // The value changes only along party 2's axis: one distinguished input.
        auto t = detail::boolean_table(k, [](auto, auto y) { return y == 0; });
        return {t, detail::tiles_of(t)};
    }
    if (name == "f2") {
        if (spec.g < 0 || spec.g > k - 1) throw ValidationError("f2 needs 0 <= g <= k-1");
        // One distinguished row with 2^{k-g-1} ordinary rows above it.
        const std::uint32_t row = n - (1u << (k - spec.g - 1)) - 1;
        auto t = detail::boolean_table(k, [row](auto, auto y) { return y == row; });
        return {t, detail::tiles_of(t)};
    }
    if (name == "notile") {
        if (k != 2) throw ValidationError("notile is defined for k=2 only");
        // value[x][y]: singletons on x=0 and y=3, a pinwheel of four dominoes
        // around the center cell (2,1) elsewhere.
        static constexpr std::uint32_t v[4][4] = {{9, 8, 7, 6}, {2, 1, 1, 10}, {2, 5, 4, 11}, {3, 3, 4, 12}};
        std::vector<std::string> alphabet;
        for (int s = 1; s <= 12; ++s) alphabet.push_back(std::to_string(s));
        auto t = build_table(2, 2, alphabet, [](std::span<const std::uint32_t> in) { return v[in[0]][in[1]] - 1; });
        return {t, detail::tiles_of(t)};
    }
    if (name == "hless") return detail::hless(k);
    if (name == "paterson_yao_3d") return detail::paterson_yao_3d(k);
    if (name == "random_boolean_tiling") return random_boolean_tiling(k, spec.seed);
    if (name == "random_guillotine_tiling") return random_guillotine_tiling(k, spec.seed);
    throw ValidationError("unknown gallery entry '" + name + "'");
}

/// The adversarial distribution for the pinwheel: (1+c)/16 on the eight
/// domino cells, (1-c)/16 elsewhere. Its weight spread is 2c/16, so it is
/// 2c-approximately uniform and is tagged as arbitrary weights.
inline Distribution notile_adversarial_distribution(const Rational& c)
{
    if (c < 0 || c >= 1) throw ValidationError("c must lie in [0,1), got " + to_string(c));
    const auto inst = make({"notile", 2});
    const auto& t = inst.table;
    const auto regions = ideal_partition(t);
    std::vector<Rational> w(t.cells());
    for (std::size_t input = 0; input < t.cells(); ++input) {
        const auto size = regions.region(regions.region_at(t.cell_of_input(input))).size;
        w[input] = (size == 2 ? Rational(1 + c) : Rational(1 - c)) / 16;
        w[input].canonicalize();
    }
    return Distribution::from_weights(2, 2, std::move(w));
}

}  // namespace approxpriv
