#include "approxpriv/gallery.hpp"
#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

using namespace approxpriv;

namespace {

std::vector<HyperRect> sorted(std::vector<HyperRect> v)
{
    std::sort(v.begin(), v.end(), [](const HyperRect& a, const HyperRect& b) {
        std::vector<int> ka, kb;
        for (const auto& iv : a.axes) ka.insert(ka.end(), {iv.lo, iv.hi});
        for (const auto& iv : b.axes) kb.insert(kb.end(), {iv.lo, iv.hi});
        return ka < kb;
    });
    return v;
}

void require_exact_partition(const std::vector<HyperRect>& tiles, const FunctionTable& t)
{
    std::vector<int> hits(t.cells(), 0);
    for (const auto& r : tiles) {
        REQUIRE(t.is_monochromatic(r));
        t.shape().for_each_cell(r, [&](std::size_t c) { ++hits[c]; });
    }
    for (auto h : hits) REQUIRE(h == 1);
}

}  // namespace

TEST_CASE("set covering at k=1")
{
    const auto t = make({"set_covering", 1}).table;
    CHECK(t.symbol(t.at(std::vector<int>{0, 0})) == "0");
    CHECK(t.symbol(t.at(std::vector<int>{0, 1})) == "1");
    CHECK(t.symbol(t.at(std::vector<int>{1, 0})) == "1");
    CHECK(t.symbol(t.at(std::vector<int>{1, 1})) == "1");
}

TEST_CASE("set covering recurrence")
{
    CHECK(setcov_recurrence(0, 0, 2) == 9);
    CHECK(setcov_recurrence(1, 2, 2) == 33);
    CHECK(setcov_recurrence(1, 1, 2) == 28);
    CHECK(setcov_recurrence(2, 2, 2) == 100);
    for (int k = 1; k <= 6; ++k) {
        CHECK(setcov_recurrence(k, k, k) >= pow_int(9, k));
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j) CHECK(setcov_recurrence(i, j, k) == oracle::setcov_g(i, j, k));
    }
    CHECK_THROWS_AS(setcov_recurrence(3, 1, 2), ValidationError);
}

TEST_CASE("three-party construction at k=2")
{
    const auto inst = make({"paterson_yao_3d", 2});
    REQUIRE(inst.tiles);
    std::size_t long_tiles = 0, units = 0;
    std::uint64_t volume = 0;
    std::vector<int> per_axis(3, 0);
    for (const auto& r : *inst.tiles) {
        volume += r.volume();
        if (r.volume() == 1) {
            ++units;
            continue;
        }
        ++long_tiles;
        CHECK(r.volume() == 4);
        for (int a = 0; a < 3; ++a)
            if (r[a].length() == 4) ++per_axis[a];
    }
    CHECK(long_tiles == 12);
    CHECK(units == 16);
    CHECK(volume == 64);
    CHECK(per_axis == std::vector<int>{4, 4, 4});
    require_exact_partition(*inst.tiles, inst.table);
    CHECK(inst.table.alphabet().size() == inst.tiles->size());
}

TEST_CASE("nested frames")
{
    const auto inst = make({"hless", 4});
    REQUIRE(inst.tiles);
    require_exact_partition(*inst.tiles, inst.table);
    std::multiset<std::uint64_t> outer;
    for (const auto& r : *inst.tiles)
        if (r[0].lo == 0 || r[1].lo == 0 || r[0].hi == 15 || r[1].hi == 15) outer.insert(r.volume());
    CHECK(outer.count(8) == 4);
    CHECK(outer.count(7) == 4);
    CHECK(outer.size() == 8);
    CHECK(inst.table.alphabet().size() <= 8);

    const auto nb = detail::tile_neighbours(inst.table.shape(), *inst.tiles);
    for (std::size_t i = 0; i < nb.size(); ++i)
        for (auto j : nb[i]) {
            std::vector<int> a, b;
            for (const auto& iv : (*inst.tiles)[i].axes) a.push_back(iv.lo);
            for (const auto& iv : (*inst.tiles)[j].axes) b.push_back(iv.lo);
            CHECK(inst.table.at(a) != inst.table.at(b));
        }
    CHECK_THROWS_AS(make({"hless", 3}), ValidationError);
    CHECK_NOTHROW(make({"hless", 2}));
}

TEST_CASE("ideal partition recovers the generated tiles")
{
    std::vector<GalleryInstance> cases{make({"hless", 2}), make({"hless", 4}), make({"paterson_yao_3d", 1}),
                                       make({"paterson_yao_3d", 2}), make({"constant", 2})};
    for (std::uint64_t s = 0; s < 10; ++s) cases.push_back(random_guillotine_tiling(1 + s % 4, s));
    for (const auto& inst : cases) {
        std::vector<HyperRect> found;
        const auto map = ideal_partition(inst.table);
        for (const auto& r : map.regions()) {
            REQUIRE(r.is_rectangle);
            found.push_back(r.bbox);
        }
        REQUIRE(sorted(found) == sorted(*inst.tiles));
    }
}

TEST_CASE("bad-case functions")
{
    const auto f1 = make({"f1", 3}).table;
    CHECK(ideal_partition(f1).region_count() == 2);
    const auto f2 = make({"f2", 4, 1}).table;
    CHECK(ideal_partition(f2, RegionSemantics::level_sets).region_count() == 2);
    CHECK(ideal_partition(f2).region_count() == 3);
    CHECK_THROWS_AS(make({"f2", 3, 3}), ValidationError);
}

TEST_CASE("parity becomes a tiling under the sorted ordering")
{
    for (int k = 1; k <= 4; ++k) {
        const auto t = make({"parity", k}).table;
        const auto info = tiling_info(ideal_partition(t));
        CHECK(info.is_tiling);
        CHECK(info.r_f == 4);
    }
}

TEST_CASE("generators are reproducible")
{
    for (const auto& name : gallery_names()) {
        GallerySpec spec{name, 2, 1, 9};
        if (name == "paterson_yao_3d") spec.k = 1;
        const auto a = make(spec);
        const auto b = make(spec);
        CHECK(a.table.raw_values() == b.table.raw_values());
        CHECK(a.table.alphabet() == b.table.alphabet());
    }
    CHECK(random_boolean_tiling(3, 1).table.raw_values() != random_boolean_tiling(3, 2).table.raw_values());
    CHECK_THROWS_AS(make({"nope", 2}), ValidationError);
    CHECK_THROWS_AS(make({"equality", 0}), ValidationError);
    CHECK_THROWS_AS(make({"notile", 3}), ValidationError);
}

TEST_CASE("random Boolean tilings are two-valued tilings")
{
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto t = random_boolean_tiling(1 + s % 5, s).table;
        CHECK(t.alphabet().size() <= 2);
        CHECK(tiling_info(ideal_partition(t)).is_tiling);
    }
}
