#include "approxpriv/bsp.hpp"
#include "approxpriv/gallery.hpp"
#include "oracle.hpp"

#include <catch_amalgamated.hpp>

using namespace approxpriv;

namespace {

void check_fragments_cover(const BspTree& bsp, const std::vector<HyperRect>& rects)
{
    std::vector<std::uint64_t> area(rects.size(), 0);
    for (const auto& n : bsp.nodes()) {
        if (!n.is_leaf() || !n.fragment) continue;
        REQUIRE(rects[n.fragment->rect].contains(n.fragment->box));
        REQUIRE(n.cell.contains(n.fragment->box));
        area[n.fragment->rect] += n.fragment->box.volume();
    }
    for (std::size_t i = 0; i < rects.size(); ++i) REQUIRE(area[i] == rects[i].volume());
}

}  // namespace

TEST_CASE("random guillotine tilings stay within four fragments per tile")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const int k = 1 + static_cast<int>(seed % 5);
        const auto inst = random_guillotine_tiling(k, seed);
        const auto& tiles = *inst.tiles;
        const auto bsp = build_bsp(tiles, inst.table.shape().bounds());
        const auto rep = fragment_report(bsp);
        REQUIRE(rep.max_count <= 4);
        REQUIRE(bsp.leaf_count() <= 4 * tiles.size());
        REQUIRE(bsp.height() <= 4 * tiles.size());
        check_fragments_cover(bsp, tiles);
        const auto tree = bsp_to_protocol(bsp, inst.table);
        REQUIRE_FALSE(validate_dissection(tree, inst.table));
    }
}

TEST_CASE("non-guillotine tilings and loose rectangle sets")
{
    const auto h = make({"hless", 4});
    const auto bsp = build_bsp(*h.tiles, h.table.shape().bounds());
    CHECK(fragment_report(bsp).max_count <= 4);
    check_fragments_cover(bsp, *h.tiles);

    // Disjoint rectangles that do not cover the grid.
    const std::vector<HyperRect> loose{HyperRect({{0, 1}, {0, 0}}), HyperRect({{3, 3}, {1, 3}}), HyperRect({{1, 2}, {2, 2}})};
    const auto b2 = build_bsp(loose, HyperRect::full(2, 4));
    CHECK(fragment_report(b2).max_count <= 4);
    check_fragments_cover(b2, loose);
}

TEST_CASE("free cuts fragment nothing")
{
    // Two stacked halves: a single free cut separates them.
    const std::vector<HyperRect> halves{HyperRect({{0, 1}, {0, 3}}), HyperRect({{2, 3}, {0, 3}})};
    const auto bsp = build_bsp(halves, HyperRect::full(2, 4));
    CHECK(bsp.leaf_count() == 2);
    CHECK(fragment_report(bsp).max_count == 1);
}

TEST_CASE("pinwheel needs one fragmented domino")
{
    const auto t = make({"notile", 2}).table;
    const auto ideal = ideal_partition(t);
    const auto rects = bsp_input_rects(ideal);
    CHECK(rects.size() == 12);
    const auto bsp = build_bsp(rects, t.shape().bounds());
    CHECK(fragment_report(bsp).max_count == 2);
    CHECK(bsp.leaf_count() == 13);
    const auto tree = bsp_protocol(t);
    CHECK_FALSE(validate_dissection(tree, t));
}

TEST_CASE("BSP input validation")
{
    const auto full = HyperRect::full(2, 4);
    CHECK_THROWS_AS(build_bsp({HyperRect({{0, 1}, {0, 1}}), HyperRect({{1, 2}, {1, 2}})}, full), ValidationError);
    CHECK_THROWS_AS(build_bsp({HyperRect({{0, 4}, {0, 1}})}, full), ValidationError);
    CHECK_THROWS_AS(build_bsp({}, HyperRect::full(3, 2)), ValidationError);
    const auto bsp = build_bsp({full}, full);
    CHECK(bsp.leaf_count() == 1);
    CHECK_THROWS_AS(bsp_to_protocol(bsp, make({"f1", 2}).table), ProtocolError);
    CHECK_THROWS_AS(bsp_to_protocol(bsp, make({"f1", 3}).table), ValidationError);
}
