#include "approxpriv/gallery.hpp"
#include "approxpriv/protocol.hpp"
#include "approxpriv/verify.hpp"
#include "oracle.hpp"

#include <catch_amalgamated.hpp>

#include <set>

using namespace approxpriv;

namespace {

void require_leaves_partition(const ProtocolTree& tree, const FunctionTable& t)
{
    const auto g = oracle::grid_of(t);
    std::vector<int> hits(g.cells(), 0);
    for (const auto& leaf : oracle::leaves_of(tree, g)) {
        REQUIRE(oracle::mono(g, leaf));
        g.each(leaf, [&](long c) { ++hits[c]; });
    }
    for (auto h : hits) REQUIRE(h == 1);
}

}  // namespace

TEST_CASE("validation rejects malformed protocols")
{
    const auto t = make({"f1", 2}).table;  // "1" iff column 0
    {
        ProtocolTree bad;
        bad.add_leaf("0");
        const auto v = validate_dissection(bad, t);
        REQUIRE(v);
        CHECK(v->kind == ViolationKind::non_monochromatic_leaf);
    }
    {
        ProtocolTree bad;
        const auto l = bad.add_leaf("1"), h = bad.add_leaf("0");
        bad.add_cut(2, 0, l, h);
        REQUIRE(validate_dissection(bad, t));
        CHECK(validate_dissection(bad, t)->kind == ViolationKind::bad_party);
    }
    {
        ProtocolTree bad;
        const auto l = bad.add_leaf("1"), h = bad.add_leaf("0");
        bad.add_cut(1, 3, l, h);
        REQUIRE(validate_dissection(bad, t));
        CHECK(validate_dissection(bad, t)->kind == ViolationKind::cut_out_of_range);
    }
    {
        ProtocolTree bad;
        const auto l = bad.add_leaf("0"), h = bad.add_leaf("0");
        bad.add_cut(1, 0, l, h);
        REQUIRE(validate_dissection(bad, t));
        CHECK(validate_dissection(bad, t)->kind == ViolationKind::leaf_value_mismatch);
    }
    {
        ProtocolTree bad;
        const auto l = bad.add_leaf("1"), h = bad.add_leaf("7");
        bad.add_cut(1, 0, l, h);
        REQUIRE(validate_dissection(bad, t));
        CHECK(validate_dissection(bad, t)->kind == ViolationKind::unknown_symbol);
    }
    {
        ProtocolTree good;
        const auto l = good.add_leaf("1"), h = good.add_leaf("0");
        good.add_cut(1, 0, l, h);
        CHECK_FALSE(validate_dissection(good, t));
        CHECK_THROWS_AS(run_protocol(ProtocolTree{}, t), ProtocolError);
    }
}

TEST_CASE("running a protocol gives distinct transcripts per leaf")
{
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = random_table(2, 1 + trial % 3, 3, 40 + trial);
        std::mt19937_64 rng(trial);
        const auto tree = random_dissection(t, rng);
        REQUIRE_FALSE(validate_dissection(tree, t));
        require_leaves_partition(tree, t);
        const auto run = run_protocol(tree, t);
        std::set<std::string> transcripts;
        for (const auto& leaf : run.leaves) {
            CHECK(leaf.transcript.value == t.symbol(leaf.value));
            transcripts.insert(leaf.transcript.to_string());
        }
        CHECK(transcripts.size() == run.leaves.size());
        CHECK(run.leaves.size() == tree.leaf_count());
        for (std::size_t c = 0; c < t.cells(); ++c) REQUIRE(run.leaf_of(c).rect.contains(std::vector<int>{
            t.shape().coord(c, 0), t.shape().coord(c, 1)}));
    }
}

TEST_CASE("bisection produces dyadic monochromatic leaves")
{
    for (int k = 1; k <= 4; ++k) {
        const auto t = make({"equality", k}).table;
        const auto tree = bisection_family(t);
        REQUIRE_FALSE(validate_dissection(tree, t));
        require_leaves_partition(tree, t);
        const auto run = run_protocol(tree, t);
        for (const auto& leaf : run.leaves)
            for (int a = 0; a < 2; ++a) {
                const int len = leaf.rect[a].length();
                CHECK((len & (len - 1)) == 0);
                CHECK(leaf.rect[a].lo % len == 0);
            }
    }
}

TEST_CASE("set covering bisection keeps the 2x2 block and singleton neighbours")
{
    const auto t = make({"set_covering", 2}).table;
    const auto run = run_protocol(bisection_family(t), t);
    bool square = false;
    std::size_t singletons = 0;
    for (const auto& leaf : run.leaves) {
        if (leaf.rect == HyperRect({{0, 1}, {0, 1}})) square = true;
        if (leaf.rect.volume() == 1) ++singletons;
    }
    CHECK(square);
    CHECK(singletons == 12);
}

TEST_CASE("uninformative parties never cut")
{
    const auto t = make({"f1", 4}).table;
    const auto tree = bisection_family(t);
    for (const auto& n : tree.nodes())
        if (!n.is_leaf()) CHECK(n.party == 1);
    CHECK(is_informative(t, t.shape().bounds(), 1));
    CHECK_FALSE(is_informative(t, t.shape().bounds(), 0));
}

TEST_CASE("bisection variants")
{
    const auto t = make({"f2", 4, 1}).table;
    for (const auto& v : {BisectionVariant::plain(), BisectionVariant::with_c(make_rational(3, 4)),
                          BisectionVariant::bounded(0), BisectionVariant::bounded(2)}) {
        const auto tree = bisection_family(t, v);
        REQUIRE_FALSE(validate_dissection(tree, t));
        require_leaves_partition(tree, t);
    }
    CHECK_THROWS_AS(bisection_family(t, BisectionVariant::with_c(make_rational(1, 4))), ValidationError);
    CHECK_THROWS_AS(bisection_family(t, BisectionVariant::with_c(1)), ValidationError);
    CHECK_THROWS_AS(bisection_family(t, BisectionVariant::bounded(5)), ValidationError);
    const auto alt = bisection_family(t, {}, Scheduling::alternating);
    CHECK_FALSE(validate_dissection(alt, t));
}

TEST_CASE("perfect protocol on Boolean tilings matches the ideal partition")
{
    for (int seed = 0; seed < 40; ++seed) {
        const auto t = random_boolean_tiling(1 + seed % 4, seed).table;
        const auto tree = perfect_boolean_protocol(t);
        REQUIRE_FALSE(validate_dissection(tree, t));
        require_leaves_partition(tree, t);
        const auto g = oracle::grid_of(t);
        const auto comp = oracle::component_of(g);
        for (const auto& leaf : oracle::leaves_of(tree, g)) {
            long first = -1;
            long count = 0;
            g.each(leaf, [&](long c) {
                if (first < 0) first = comp[c];
                REQUIRE(comp[c] == first);
                ++count;
            });
            REQUIRE(count == oracle::region_size_per_cell(g)[g.index({leaf.iv[0].first, leaf.iv[1].first})]);
        }
    }
    CHECK_THROWS_AS(perfect_boolean_protocol(make({"equality", 2}).table), NotBooleanTiling);
    CHECK_THROWS_AS(perfect_boolean_protocol(make({"notile", 2}).table), NotBooleanTiling);
}

TEST_CASE("refining a leaf splits it into two same-valued leaves")
{
    const auto t = make({"constant", 2}).table;
    ProtocolTree tree;
    tree.add_leaf("0");
    const auto r = refine_leaf(tree, tree.root(), 0, 1);
    CHECK_FALSE(validate_dissection(r, t));
    CHECK(r.leaf_count() == 2);
    CHECK(r.height() == 1);
}
