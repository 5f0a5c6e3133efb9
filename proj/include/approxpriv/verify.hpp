#pragma once

// Self-checks reproducing the published numbers. Each check maps to one
// acceptance criterion; the quick suite restricts sizes to k <= 3.

#include "approxpriv/bsp.hpp"
#include "approxpriv/gallery.hpp"
#include "approxpriv/par.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace approxpriv {

enum class Suite { quick, paper };

struct VerifySuiteResult {
    int id = 0;
    std::string claim;
    std::string computed;
    bool pass = false;
    double seconds = 0;
    std::vector<std::string> notes;
};

/// Random table with values drawn from `symbols` output values.
inline FunctionTable random_table(int d, int k, std::size_t symbols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const std::size_t cells = std::size_t{1} << (d * k);
    std::vector<std::uint32_t> raw(cells);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(symbols - 1));
    for (auto& v : raw) v = pick(rng);
    return FunctionTable(d, k, detail::index_symbols(symbols), std::move(raw), {});
}

namespace detail {

struct CheckLog {
    bool pass = true;
    std::ostringstream computed;
    std::vector<std::string> notes;

    void fail(const std::string& why)
    {
        pass = false;
        notes.push_back(why);
    }
    void expect(bool ok, const std::string& why)
    {
        if (!ok) fail(why);
    }
};

inline void check_equality(Suite suite, CheckLog& log)
{
    const int kmax = suite == Suite::quick ? 3 : 7;
    for (int k = 2; k <= kmax; ++k) {
        const auto t = make({"equality", k}).table;
        const auto rep = compute_par(t, bisection_family(t), Distribution::uniform(2, k));
        const Rational avg = Rational(pow_int(2, k)) - 2 + pow2(1 - k);
        const Rational worst = Rational(pow_int(2, 2 * k - 1) - pow_int(2, k - 1));
        log.computed << "k=" << k << ": " << to_string(rep.average) << ", " << to_string(rep.worst) << "; ";
        log.expect(rep.average == avg, "k=" + std::to_string(k) + " average " + to_string(rep.average) + " != " + to_string(avg));
        log.expect(rep.worst == worst, "k=" + std::to_string(k) + " worst " + to_string(rep.worst) + " != " + to_string(worst));
    }
}

inline void check_set_covering(Suite suite, CheckLog& log)
{
    const int kmax = suite == Suite::quick ? 3 : 4;
    for (int k = 1; k <= kmax; ++k) {
        const auto t = make({"set_covering", k}).table;
        const auto rep = compute_par(t, bisection_family(t), Distribution::uniform(2, k));
        const Rational expect = Rational(setcov_recurrence(k, k, k)) / Rational(pow_int(4, k));
        log.computed << "k=" << k << ": " << to_string(rep.average) << "; ";
        log.expect(rep.average == expect, "k=" + std::to_string(k) + " simulated " + to_string(rep.average) +
                                              " != recurrence " + to_string(expect));
    }
    for (int k = 1; k <= 6; ++k) {
        const auto g = setcov_recurrence(k, k, k);
        log.expect(g >= pow_int(9, k), "g(k,k,k) < 9^k at k=" + std::to_string(k));
    }
}

inline void check_boolean_tilings(Suite suite, CheckLog& log)
{
    std::vector<std::pair<std::string, FunctionTable>> cases;
    const int count = suite == Suite::quick ? 50 : 200;
    const int kmax = suite == Suite::quick ? 3 : 5;
    for (int i = 0; i < count; ++i) {
        const int k = 1 + i % kmax;
        cases.emplace_back("random seed " + std::to_string(i), random_boolean_tiling(k, 1000 + i).table);
    }
    for (int k = 1; k <= kmax; ++k) {
        cases.emplace_back("f1 k=" + std::to_string(k), make({"f1", k}).table);
        cases.emplace_back("parity k=" + std::to_string(k), make({"parity", k}).table);
        cases.emplace_back("constant k=" + std::to_string(k), make({"constant", k}).table);
        for (int g = 0; g < k; ++g) cases.emplace_back("f2 k=" + std::to_string(k) + " g=" + std::to_string(g), make({"f2", k, g}).table);
    }
    std::size_t failures = 0;
    for (const auto& [name, t] : cases) {
        try {
            const auto tree = perfect_boolean_protocol(t);
            if (validate_dissection(tree, t)) throw ProtocolError(0, "protocol does not validate");
            const auto ideal = ideal_partition(t);
            const auto run = run_protocol(tree, t);
            if (run.induced.labels() != ideal.labels()) throw ProtocolError(0, "induced tiling differs from the ideal partition");
            const auto rep = compute_par(t, tree, Distribution::uniform(2, t.bits()), ideal);
            if (rep.average != 1 || rep.worst != 1) throw ProtocolError(0, "PAR is not 1");
        } catch (const std::exception& e) {
            ++failures;
            log.fail(name + ": " + e.what());
        }
    }
    log.computed << cases.size() << " tables, " << failures << " failures";
}

inline void check_bsp(Suite suite, CheckLog& log)
{
    std::vector<std::pair<std::string, FunctionTable>> cases;
    const int count = suite == Suite::quick ? 20 : 100;
    const int kmax = suite == Suite::quick ? 3 : 5;
    const int dists = suite == Suite::quick ? 5 : 20;
    for (int i = 0; i < count; ++i) {
        const int k = 1 + i % kmax;
        cases.emplace_back("guillotine seed " + std::to_string(i), random_guillotine_tiling(k, 5000 + i).table);
    }
    for (int k = 1; k <= kmax; ++k) {
        cases.emplace_back("f1 k=" + std::to_string(k), make({"f1", k}).table);
        cases.emplace_back("parity k=" + std::to_string(k), make({"parity", k}).table);
        cases.emplace_back("constant k=" + std::to_string(k), make({"constant", k}).table);
        for (int g = 0; g < k; ++g) cases.emplace_back("f2 k=" + std::to_string(k) + " g=" + std::to_string(g), make({"f2", k, g}).table);
        if (k % 2 == 0) cases.emplace_back("hless k=" + std::to_string(k), make({"hless", k}).table);
        cases.emplace_back("random boolean k=" + std::to_string(k), random_boolean_tiling(k, 77 + k).table);
    }
    const std::vector<Rational> cs{0, make_rational(1, 4), make_rational(1, 2)};
    std::size_t max_frag = 0;
    Rational max_ratio = 0;
    for (const auto& [name, t] : cases) {
        try {
            const auto ideal = ideal_partition(t);
            const auto rf = ideal.region_count();
            const auto bsp = build_bsp(bsp_input_rects(ideal), t.shape().bounds());
            const auto frag = fragment_report(bsp);
            max_frag = std::max(max_frag, frag.max_count);
            log.expect(frag.max_count <= 4, name + ": a tile has " + std::to_string(frag.max_count) + " fragments");
            log.expect(bsp.leaf_count() <= 4 * rf, name + ": leaf count above 4 r_f");
            log.expect(bsp.height() <= 4 * rf, name + ": height above 4 r_f");
            const auto tree = bsp_to_protocol(bsp, t);
            const auto uni = compute_par(t, tree, Distribution::uniform(2, t.bits()), ideal);
            max_ratio = std::max(max_ratio, Rational(uni.average / 4));
            log.expect(uni.average <= 4, name + ": uniform average " + to_string(uni.average) + " > 4");
            for (const auto& c : cs)
                for (int s = 0; s < dists; ++s) {
                    const auto dist = random_c_approx_distribution(2, t.bits(), c, 31 * s + 7);
                    const auto rep = compute_par(t, tree, dist, ideal);
                    const Rational bound = 4 * (1 + c);
                    max_ratio = std::max(max_ratio, Rational(rep.average / bound));
                    log.expect(rep.average <= bound, name + ": c=" + to_string(c) + " seed " + std::to_string(s) +
                                                         " average " + to_string(rep.average) + " > " + to_string(bound));
                }
        } catch (const std::exception& e) {
            log.fail(name + ": " + e.what());
        }
    }
    log.computed << cases.size() << " tilings, max fragments " << max_frag << ", max avg/bound "
                 << to_string(max_ratio);
}

inline void check_notile(CheckLog& log, unsigned threads)
{
    const auto t = make({"notile", 2}).table;
    PermSearch search;
    search.threads = threads;
    const auto uni = optimal_par_over_perms(t, Objective::average, Distribution::uniform(2, 2), search);
    log.computed << "uniform min " << to_string(uni.best) << " over " << uni.evaluated << " pairs";
    log.expect(uni.exhaustive && uni.evaluated == 576, "expected an exhaustive sweep of 576 pairs");
    log.expect(uni.best == make_rational(9, 8), "uniform minimum " + to_string(uni.best) + " != 9/8");
    for (const auto& c : {make_rational(1, 4), make_rational(1, 2)}) {
        const auto adv = optimal_par_over_perms(t, Objective::average, notile_adversarial_distribution(c), search);
        const Rational bound = (9 + c) / 8;
        log.computed << "; c=" << to_string(c) << " min " << to_string(adv.best);
        log.expect(adv.best >= bound, "c=" + to_string(c) + " minimum " + to_string(adv.best) + " < " + to_string(bound));
    }
    PermSearch recompute = search;
    recompute.regions = PermSearch::Regions::recompute;
    const auto rec = optimal_par_over_perms(t, Objective::average, Distribution::uniform(2, 2), recompute);
    log.notes.push_back("with regions recomputed per ordering the minimum is " + to_string(rec.best));
}

inline void check_hless(Suite suite, CheckLog& log, unsigned threads)
{
    if (suite == Suite::paper) {
        const auto t4 = make({"hless", 4}).table;
        const auto id = optimal_par(t4, Objective::worst);
        log.computed << "hless(4) identity " << to_string(id.value);
        log.expect(id.value > 3, "hless(4) identity worst " + to_string(id.value) + " <= 3");
        PermSearch sample;
        sample.mode = PermSearch::Mode::sample;
        sample.samples = 50;
        sample.seed = 2024;
        sample.threads = threads;
        const auto s = optimal_par_over_perms(t4, Objective::worst, Distribution::uniform(2, 4), sample);
        log.computed << ", sampled min " << to_string(s.best) << " over " << s.evaluated << "; ";
        log.expect(s.best > 3, "hless(4) sampled worst minimum " + to_string(s.best) + " <= 3");
    }
    const auto t2 = make({"hless", 2}).table;
    PermSearch all;
    all.threads = threads;
    const auto e = optimal_par_over_perms(t2, Objective::worst, Distribution::uniform(2, 2), all);
    log.computed << "hless(2) min " << to_string(e.best) << " over " << e.evaluated;
    log.expect(e.best > 1, "hless(2) worst minimum " + to_string(e.best) + " <= 1");
}

inline void check_three_party(Suite suite, CheckLog& log)
{
    for (int k = 1; k <= 3; ++k) {
        const auto inst = make({"paterson_yao_3d", k});
        const auto& tiles = *inst.tiles;
        std::uint64_t nontrivial = 0, total = 0;
        for (std::size_t i = 0; i < tiles.size(); ++i) {
            total += tiles[i].volume();
            if (tiles[i].volume() > 1) {
                nontrivial += tiles[i].volume();
                log.expect(tiles[i].volume() == (1u << k), "k=" + std::to_string(k) + ": a long tile has volume != 2^k");
            }
            for (std::size_t j = i + 1; j < tiles.size(); ++j)
                log.expect(!tiles[i].intersects(tiles[j]), "k=" + std::to_string(k) + ": tiles overlap");
        }
        log.expect(total == inst.table.cells(), "k=" + std::to_string(k) + ": tiles do not cover the cube");
        if (k == 2) log.expect(nontrivial == 48, "k=2: long tiles cover " + std::to_string(nontrivial) + " cells, not 48");
    }
    const auto rows = threeparty_growth(2, suite == Suite::quick ? 2 : 3);
    log.computed << "alpha(2) = " << to_string(rows[0].value);
    log.expect(rows[0].value > 1, "alpha(2) <= 1");
    if (rows.size() > 1) {
        log.computed << ", alpha(3) = " << to_string(rows[1].value) << ", ratio " << to_string(*rows[1].ratio);
        log.expect(*rows[1].ratio >= make_rational(3, 2), "alpha(3)/alpha(2) < 3/2");
    }
}

inline void check_badcase(Suite suite, CheckLog& log)
{
    const int kmax = suite == Suite::quick ? 3 : 6;
    for (int k = 2; k <= kmax; ++k) {
        const auto t = make({"f1", k}).table;
        const auto rep = compute_par(t, bisection_family(t, BisectionVariant::with_c(make_rational(1, 2))),
                                     Distribution::uniform(2, k));
        const Rational expect = k * (1 - pow2(-k)) + pow2(-k);
        log.computed << "f1 k=" << k << ": " << to_string(rep.average) << "; ";
        log.expect(rep.average == expect, "f1 k=" + std::to_string(k) + " average " + to_string(rep.average));
        log.expect(abs(rep.average - k) <= 1, "f1 k=" + std::to_string(k) + " not within 1 of k");
    }
    std::vector<std::pair<int, int>> kg{{4, 1}, {4, 2}, {5, 2}};
    if (suite == Suite::quick) kg = {{3, 1}};
    for (auto [k, g] : kg) {
        const auto t = make({"f2", k, g}).table;
        const auto rep = compute_par(t, bisection_family(t, BisectionVariant::bounded(g)), Distribution::uniform(2, k));
        const Rational target = g + pow_int(2, k - g - 1) - 1;
        log.computed << "f2 (" << k << "," << g << "): " << to_string(rep.average) << " vs " << to_string(target) << "; ";
        log.expect(abs(rep.average - target) <= 1,
                   "f2 (" + std::to_string(k) + "," + std::to_string(g) + ") average " + to_string(rep.average));
    }
}

inline void check_fuzz(Suite suite, CheckLog& log)
{
    const int tables = suite == Suite::quick ? 30 : 100;
    const int refinements = suite == Suite::quick ? 300 : 1000;
    std::size_t compared = 0;
    for (int i = 0; i < tables; ++i) {
        const int k = 1 + i % 3;
        const auto t = random_table(2, k, 2 + i % 3, 9000 + i);
        const auto dist = Distribution::uniform(2, k);
        const auto ideal = ideal_partition(t);
        const auto best = optimal_par(t, Objective::average, dist, ideal).value;
        auto cmp = [&](const ProtocolTree& tree, const std::string& what) {
            const auto v = compute_par(t, tree, dist, ideal).average;
            ++compared;
            log.expect(best <= v, "table " + std::to_string(i) + ": optimum " + to_string(best) + " > " + what + " " + to_string(v));
        };
        cmp(bisection_family(t), "bisection");
        if (tiling_info(ideal).is_tiling) cmp(bsp_to_protocol(build_bsp(bsp_input_rects(ideal), t.shape().bounds()), t), "bsp");
        std::mt19937_64 rng(i);
        for (int r = 0; r < 10; ++r) cmp(random_dissection(t, rng), "random");
    }
    std::mt19937_64 rng(4242);
    int done = 0;
    for (int r = 0; done < refinements; ++r) {
        const int k = 1 + r % 3;
        const auto t = random_table(2, k, 3, 20000 + r);
        const auto ideal = ideal_partition(t);
        const auto dist = random_c_approx_distribution(2, k, make_rational(1, 2), r);
        const auto tree = random_dissection(t, rng);
        const auto run = run_protocol(tree, t);
        const auto before = compute_par(t, tree, dist, ideal);
        for (int step = 0; step < 5 && done < refinements; ++step) {
            const auto& leaf = run.leaves[std::uniform_int_distribution<std::size_t>(0, run.leaves.size() - 1)(rng)];
            std::vector<int> axes;
            for (int a = 0; a < 2; ++a)
                if (leaf.rect[a].length() > 1) axes.push_back(a);
            if (axes.empty()) continue;
            const int a = axes[std::uniform_int_distribution<std::size_t>(0, axes.size() - 1)(rng)];
            const int m = std::uniform_int_distribution<int>(leaf.rect[a].lo, leaf.rect[a].hi - 1)(rng);
            const auto after = compute_par(t, refine_leaf(tree, leaf.node, a, m), dist, ideal);
            ++done;
            log.expect(after.average >= before.average && after.worst >= before.worst,
                       "refinement lowered PAR on table seed " + std::to_string(20000 + r));
        }
    }
    log.computed << compared << " comparisons, " << done << " refinements";
}

}  // namespace detail

inline const std::vector<std::string>& verify_claims()
{
    static const std::vector<std::string> claims{
        "equality: bisection average 2^k-2+2^{1-k}, worst 2^{2k-1}-2^{k-1}",
        "set covering: bisection average g(k,k,k)/4^k and g(k,k,k) >= 9^k",
        "Boolean tilings admit a perfectly private dissection protocol",
        "BSP protocol: <= 4 fragments per tile, size and height <= 4 r_f, average <= 4(1+c)",
        "pinwheel: optimal average 9/8 over all orderings, >= (9+c)/8 under the adversarial weights",
        "nested frames: optimal worst case > 3 at k=4 and > 1 at k=2",
        "three-party construction: alpha(2) > 1 and alpha(3)/alpha(2) >= 3/2",
        "bad cases: f1 c-bisection k(1-2^-k)+2^-k, f2 bounded bisection within 1 of g+2^{k-g-1}-1",
        "optimal dissection dominates every protocol; refinement never lowers PAR"};
    return claims;
}

inline VerifySuiteResult run_check(int id, Suite suite, unsigned threads = 1)
{
    detail::CheckLog log;
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (id) {
        case 1: detail::check_equality(suite, log); break;
        case 2: detail::check_set_covering(suite, log); break;
        case 3: detail::check_boolean_tilings(suite, log); break;
        case 4: detail::check_bsp(suite, log); break;
        case 5: detail::check_notile(log, threads); break;
        case 6: detail::check_hless(suite, log, threads); break;
        case 7: detail::check_three_party(suite, log); break;
        case 8: detail::check_badcase(suite, log); break;
        case 9: detail::check_fuzz(suite, log); break;
        default: throw ValidationError("no check with id " + std::to_string(id));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        log.fail(std::string("exception: ") + e.what());
    }
    VerifySuiteResult res;
    res.id = id;
    res.claim = verify_claims().at(id - 1);
    res.computed = log.computed.str();
    res.pass = log.pass;
    res.notes = std::move(log.notes);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

inline std::vector<VerifySuiteResult> run_suite(Suite suite, unsigned threads = 1,
                                                const std::function<void(const VerifySuiteResult&)>& on_result = {})
{
    std::vector<VerifySuiteResult> out;
    for (int id = 1; id <= 9; ++id) {
        out.push_back(run_check(id, suite, threads));
        if (on_result) on_result(out.back());
    }
    return out;
}

}  // namespace approxpriv
