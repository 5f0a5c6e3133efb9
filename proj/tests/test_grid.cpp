#include "approxpriv/grid.hpp"
#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace approxpriv;

namespace {

Permutation shuffled(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
    return Permutation(order);
}

}  // namespace

TEST_CASE("permutation validation and inverse")
{
    const Permutation p({2, 0, 3, 1});
    CHECK(p.input_at(0) == 2);
    CHECK(p.position_of(2) == 0);
    CHECK(p.inverse().order() == std::vector<std::uint32_t>{1, 3, 0, 2});
    CHECK(Permutation::identity(4).is_identity());
    CHECK_FALSE(p.is_identity());
    CHECK_THROWS_AS(Permutation({0, 0, 1, 2}), ValidationError);
    CHECK_THROWS_AS(Permutation({0, 4, 1, 2}), ValidationError);
}

TEST_CASE("hyperrectangle geometry")
{
    const HyperRect r({{0, 3}, {2, 5}});
    CHECK(r.volume() == 16);
    auto [lo, hi] = r.split(0, 1);
    CHECK(lo == HyperRect({{0, 1}, {2, 5}}));
    CHECK(hi == HyperRect({{2, 3}, {2, 5}}));
    CHECK(lo.volume() + hi.volume() == r.volume());
    CHECK_FALSE(lo.intersects(hi));
    CHECK(r.contains(lo));
    CHECK(r.intersection(HyperRect({{3, 7}, {0, 2}})) == HyperRect({{3, 3}, {2, 2}}));
    CHECK_FALSE(r.intersection(HyperRect({{4, 7}, {0, 2}})).has_value());
}

TEST_CASE("grid shape flat and unflat round-trip")
{
    for (auto [d, k] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{4, 1}}) {
        const GridShape s(d, k);
        std::vector<int> c(d);
        for (std::size_t i = 0; i < s.cells(); ++i) {
            s.unflat(i, c);
            REQUIRE(s.flat(c) == i);
            for (int a = 0; a < d; ++a) REQUIRE(s.coord(i, a) == c[a]);
        }
    }
}

TEST_CASE("lookup at permuted coordinates equals f on the original inputs")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + trial % 2;
        const int k = 1 + trial % 3;
        auto f = [](std::span<const std::uint32_t> in) {
            std::uint32_t h = 17;
            for (auto x : in) h = h * 31 + x * x + 3;
            return std::to_string(h % 5);
        };
        std::vector<Permutation> perms;
        for (int a = 0; a < d; ++a) perms.push_back(shuffled(std::size_t{1} << k, rng));
        const auto t = build_table(d, k, f, perms);
        std::vector<int> c(d);
        std::vector<std::uint32_t> in(d);
        for (std::size_t cell = 0; cell < t.cells(); ++cell) {
            t.shape().unflat(cell, c);
            for (int a = 0; a < d; ++a) in[a] = perms[a].input_at(c[a]);
            REQUIRE(t.symbol(t.at(cell)) == f(in));
            REQUIRE(t.cell_of_input(t.input_of_cell(cell)) == cell);
        }
        const auto back = t.with_perms(std::vector<Permutation>(d, Permutation::identity(std::size_t{1} << k)));
        CHECK(back.raw_values() == t.raw_values());
    }
}

TEST_CASE("table validation")
{
    CHECK_THROWS_AS(FunctionTable(2, 1, {"a"}, {0, 0, 0}, {}), ValidationError);
    CHECK_THROWS_AS(FunctionTable(2, 1, {"a"}, {0, 0, 0, 1}, {}), ValidationError);
    CHECK_THROWS_AS(FunctionTable(2, 1, {"a", "a"}, {0, 0, 0, 1}, {}), ValidationError);
    CHECK_THROWS_AS(FunctionTable(2, 1, {"a"}, {0, 0, 0, 0}, {Permutation::identity(2)}), ValidationError);
    CHECK_THROWS_AS(FunctionTable(2, 1, {"a"}, {0, 0, 0, 0}, {Permutation::identity(4), Permutation::identity(4)}),
                    ValidationError);
    CHECK_THROWS_AS(FunctionTable(1, 3, {"a"}, std::vector<std::uint32_t>(8, 0), {}), ValidationError);
    CHECK_THROWS_AS(FunctionTable(2, 0, {"a"}, {0}, {}), ValidationError);
    Limits small;
    small.max_k_2d = 2;
    CHECK_THROWS_AS(FunctionTable(2, 3, {"a"}, std::vector<std::uint32_t>(64, 0), {}, small), LimitError);
}

TEST_CASE("monochromatic blocks")
{
    const auto t = build_table(2, 2, [](auto in) { return in[0] < 2 ? std::string("a") : std::string("b"); });
    CHECK(t.is_monochromatic(HyperRect({{0, 1}, {0, 3}})));
    CHECK_FALSE(t.is_monochromatic(HyperRect({{1, 2}, {0, 0}})));
    CHECK(t.find_symbol("b").has_value());
    CHECK_FALSE(t.find_symbol("z").has_value());
}

TEST_CASE("distributions")
{
    const auto u = Distribution::uniform(2, 2);
    Rational total = 0;
    for (const auto& w : u.weights()) total += w;
    CHECK(total == 1);
    CHECK(u.describe() == "uniform");

    std::vector<Rational> w(16, make_rational(1, 16));
    w[0] = make_rational(2, 16);
    CHECK_THROWS_AS(Distribution::from_weights(2, 2, w), ValidationError);
    w[1] = 0;
    CHECK_NOTHROW(Distribution::from_weights(2, 2, w));
    CHECK_THROWS_AS(Distribution::from_weights(2, 2, w, DistributionKind::c_approximate, make_rational(1, 2)),
                    ValidationError);
    w[1] = -make_rational(1, 16);
    w[0] = make_rational(3, 16);
    CHECK_THROWS_AS(Distribution::from_weights(2, 2, w), ValidationError);
    CHECK_THROWS_AS(Distribution::from_weights(2, 2, std::vector<Rational>(15, make_rational(1, 15))), ValidationError);
}

TEST_CASE("seeded c-approximate distributions satisfy the spread bound")
{
    for (const auto& c : {Rational(0), make_rational(1, 4), make_rational(1, 2), make_rational(9, 10)})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto dist = random_c_approx_distribution(2, 3, c, seed);
            Rational total = 0;
            for (const auto& w : dist.weights()) {
                REQUIRE(w >= 0);
                total += w;
            }
            REQUIRE(total == 1);
            const auto chk = validate_c_approx(dist, c);
            REQUIRE(chk.ok);
            // Independent spread check.
            const auto [mn, mx] = std::minmax_element(dist.weights().begin(), dist.weights().end());
            REQUIRE(*mx - *mn <= c / 64);
        }
    CHECK(random_c_approx_distribution(2, 2, make_rational(1, 2), 3).weights() ==
          random_c_approx_distribution(2, 2, make_rational(1, 2), 3).weights());
}

TEST_CASE("grid weights follow the inputs through permutations")
{
    std::mt19937_64 rng(11);
    const auto dist = random_c_approx_distribution(2, 2, make_rational(1, 2), 5);
    const auto t = build_table(2, 2, [](auto in) { return std::to_string(in[0] ^ in[1]); },
                               {shuffled(4, rng), shuffled(4, rng)});
    const auto g = oracle::grid_of(t);
    const auto gw = dist.grid_weights(t);
    for (long cell = 0; cell < g.cells(); ++cell) REQUIRE(gw[cell] == dist.weight(g.input[cell]));
}
