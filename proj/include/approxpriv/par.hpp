#pragma once

// Privacy approximation ratios: exact evaluation of a given protocol and the
// optimum over all dissection protocols by dynamic programming over
// sub-boxes of the grid.

#include "approxpriv/gallery.hpp"
#include "approxpriv/protocol.hpp"

#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

namespace approxpriv {

struct ParReport {
    Rational average;
    Rational worst;
    std::vector<std::size_t> fragments;       // t_i: protocol leaves meeting ideal region i
    std::vector<std::uint64_t> region_sizes;  // y_i
    std::size_t leaves = 0;
    std::size_t height = 0;
    std::size_t max_fragments = 0;
    std::string distribution;
};

/// Average and worst-case PAR of `tree` on `table` against the ideal regions
/// `ideal`: the ratio |R^I| / |R^P| per cell, weighted by `dist` or maximized.
inline ParReport compute_par(const FunctionTable& table, const ProtocolTree& tree, const Distribution& dist,
                             const RegionMap& ideal)
{
    if (!(ideal.shape() == table.shape())) throw ValidationError("region map does not match table");
    const auto run = run_protocol(tree, table);
    const auto weights = dist.grid_weights(table);
    const auto& shape = table.shape();

    ParReport rep;
    rep.fragments.assign(ideal.region_count(), 0);
    for (const auto& r : ideal.regions()) rep.region_sizes.push_back(r.size);
    rep.leaves = run.leaves.size();
    rep.height = tree.height();
    rep.distribution = dist.describe();
    rep.average = 0;
    rep.worst = 0;
    Rational weighted, ratio;
    std::vector<std::uint32_t> met;
    for (const auto& leaf : run.leaves) {
        weighted = 0;
        std::uint64_t max_y = 0;
        met.clear();
        shape.for_each_cell(leaf.rect, [&](std::size_t c) {
            const auto r = ideal.region_at(c);
            const auto y = ideal.region(r).size;
            weighted += weights[c] * Rational(Integer(static_cast<unsigned long>(y)));
            max_y = std::max(max_y, y);
            if (std::find(met.begin(), met.end(), r) == met.end()) met.push_back(r);
        });
        for (auto r : met) ++rep.fragments[r];
        const Rational vol(Integer(static_cast<unsigned long>(leaf.rect.volume())));
        rep.average += weighted / vol;
        ratio = Rational(Integer(static_cast<unsigned long>(max_y))) / vol;
        if (ratio > rep.worst) rep.worst = ratio;
    }
    for (auto t : rep.fragments) rep.max_fragments = std::max(rep.max_fragments, t);
    return rep;
}

inline ParReport compute_par(const FunctionTable& table, const ProtocolTree& tree, const Distribution& dist,
                             RegionSemantics semantics = RegionSemantics::connected)
{
    return compute_par(table, tree, dist, ideal_partition(table, semantics));
}

enum class Objective { average, worst };

struct OptimalPar {
    Rational value;
    ProtocolTree witness;
};

namespace detail {

/// Memoized search over every sub-box R of the grid:
///   cost(R) = leaf_cost(R)                                  if R is monochromatic
///           = min over cuts of combine(cost(low), cost(high)) otherwise
/// with leaf_cost = sum_{c in R} w_c |R^I(c)| / vol(R) and combine = + for the
/// average, leaf_cost = max_{c in R} |R^I(c)| / vol(R) and combine = max for
/// the worst case.
class OptimalParSearch {
public:
    static constexpr int kMaxDims = 9;

    OptimalParSearch(const FunctionTable& table, Objective objective, const Distribution& dist, const RegionMap& ideal)
        : table_(table), objective_(objective), d_(table.dims()), n_(table.side())
    {
        if (d_ > kMaxDims) throw LimitError("too many parties for the optimal search");
        if (!(ideal.shape() == table.shape())) throw ValidationError("region map does not match table");
        region_size_.resize(table.cells());
        for (std::size_t c = 0; c < table.cells(); ++c) region_size_[c] = ideal.region(ideal.region_at(c)).size;
        offset_.resize(n_ + 1, 0);
        for (int lo = 0; lo < n_; ++lo) offset_[lo + 1] = offset_[lo] + (n_ - lo);
        const auto intervals = offset_[n_];
        std::size_t total = 1;
        stride_.resize(d_);
        for (int a = d_ - 1; a >= 0; --a) {
            stride_[a] = total;
            total *= intervals;
        }
        value_.assign(total, kUnknown);
        max_size_.assign(total, 0);
        done_.assign(total, 0);
        cut_.assign(total, -1);
        cost_.resize(total);
        if (objective_ == Objective::average) {
            auto w = dist.grid_weights(table);
            for (std::size_t c = 0; c < w.size(); ++c) w[c] *= Rational(Integer(static_cast<unsigned long>(region_size_[c])));
            build_prefix(w);
        }
    }

    OptimalPar solve()
    {
        Box root{};
        for (int a = 0; a < d_; ++a) root[a] = {0, n_ - 1};
        const auto idx = index(root);
        cost(root, idx);
        OptimalPar out;
        out.value = cost_[idx];
        witness(root, out.witness);
        return out;
    }

private:
    using Box = std::array<Interval, kMaxDims>;
    static constexpr std::int64_t kUnknown = -2;
    static constexpr std::int64_t kMixed = -1;

    std::size_t index(const Box& b) const
    {
        std::size_t idx = 0;
        for (int a = 0; a < d_; ++a) idx += (offset_[b[a].lo] + (b[a].hi - b[a].lo)) * stride_[a];
        return idx;
    }

    std::uint64_t volume(const Box& b) const
    {
        std::uint64_t v = 1;
        for (int a = 0; a < d_; ++a) v *= static_cast<std::uint64_t>(b[a].length());
        return v;
    }

    std::size_t cell_of(const Box& b) const
    {
        std::size_t c = 0;
        for (int a = 0; a < d_; ++a) c += static_cast<std::size_t>(b[a].lo) * table_.shape().stride(a);
        return c;
    }

    // Value id of a monochromatic box, or kMixed; also fills max_size_.
    std::int64_t value(const Box& b, std::size_t idx)
    {
        auto& v = value_[idx];
        if (v != kUnknown) return v;
        int a = 0;
        while (a < d_ && b[a].length() == 1) ++a;
        if (a == d_) {
            const auto c = cell_of(b);
            max_size_[idx] = region_size_[c];
            return v = table_.at(c);
        }
        const int mid = b[a].lo + (b[a].length() - 1) / 2;
        Box lo = b, hi = b;
        lo[a].hi = mid;
        hi[a].lo = mid + 1;
        const auto li = index(lo), hi_idx = index(hi);
        const auto vl = value(lo, li);
        const auto vh = value(hi, hi_idx);
        max_size_[idx] = std::max(max_size_[li], max_size_[hi_idx]);
        return v = (vl >= 0 && vl == vh) ? vl : kMixed;
    }

    void build_prefix(const std::vector<Rational>& w)
    {
        // Inclusive prefix sums over an (n+1)^d array with a zero border.
        const auto side = static_cast<std::size_t>(n_ + 1);
        pstride_.resize(d_);
        std::size_t total = 1;
        for (int a = d_ - 1; a >= 0; --a) {
            pstride_[a] = total;
            total *= side;
        }
        prefix_.assign(total, Rational(0));
        const auto& shape = table_.shape();
        for (std::size_t c = 0; c < shape.cells(); ++c) {
            std::size_t p = 0;
            for (int a = 0; a < d_; ++a) p += static_cast<std::size_t>(shape.coord(c, a) + 1) * pstride_[a];
            prefix_[p] = w[c];
        }
        for (int a = 0; a < d_; ++a)
            for (std::size_t p = 0; p < total; ++p)
                if ((p / pstride_[a]) % side != 0) prefix_[p] += prefix_[p - pstride_[a]];
    }

    Rational box_sum(const Box& b) const
    {
        Rational m = 0;
        for (unsigned corner = 0; corner < (1u << d_); ++corner) {
            std::size_t p = 0;
            bool negative = false;
            for (int a = 0; a < d_; ++a) {
                if (corner & (1u << a)) {
                    p += static_cast<std::size_t>(b[a].lo) * pstride_[a];
                    negative = !negative;
                } else {
                    p += static_cast<std::size_t>(b[a].hi + 1) * pstride_[a];
                }
            }
            if (negative)
                m -= prefix_[p];
            else
                m += prefix_[p];
        }
        return m;
    }

    const Rational& cost(const Box& b, std::size_t idx)
    {
        if (done_[idx]) return cost_[idx];
        auto& out = cost_[idx];
        if (value(b, idx) >= 0) {
            const Rational vol(Integer(static_cast<unsigned long>(volume(b))));
            if (objective_ == Objective::average)
                out = box_sum(b) / vol;
            else
                out = Rational(Integer(static_cast<unsigned long>(max_size_[idx]))) / vol;
            done_[idx] = 1;
            return out;
        }
        bool have = false;
        Rational cand;
        std::int32_t best_cut = -1;
        for (int a = 0; a < d_; ++a) {
            for (int m = b[a].lo; m < b[a].hi; ++m) {
                Box lo = b, hi = b;
                lo[a].hi = m;
                hi[a].lo = m + 1;
                const Rational& cl = cost(lo, index(lo));
                const Rational& ch = cost(hi, index(hi));
                if (objective_ == Objective::average)
                    mpq_add(cand.get_mpq_t(), cl.get_mpq_t(), ch.get_mpq_t());
                else
                    cand = cl > ch ? cl : ch;
                // Strict improvement only: ties keep the lowest axis, then coordinate.
                if (!have || cand < out) {
                    out = cand;
                    have = true;
                    best_cut = a * 65536 + (m - b[a].lo);
                }
            }
        }
        cut_[idx] = best_cut;
        done_[idx] = 1;
        return out;
    }

    std::size_t witness(const Box& b, ProtocolTree& tree) const
    {
        const auto idx = index(b);
        if (value_[idx] >= 0) return tree.add_leaf(table_.symbol(static_cast<std::uint32_t>(value_[idx])));
        const int a = cut_[idx] / 65536;
        const int m = b[a].lo + cut_[idx] % 65536;
        Box lo = b, hi = b;
        lo[a].hi = m;
        hi[a].lo = m + 1;
        const auto l = witness(lo, tree);
        const auto h = witness(hi, tree);
        return tree.add_cut(a, m, l, h);
    }

    const FunctionTable& table_;
    Objective objective_;
    int d_;
    int n_;
    std::vector<std::uint64_t> region_size_;
    std::vector<std::size_t> offset_;
    std::vector<std::size_t> stride_;
    std::vector<std::int64_t> value_;
    std::vector<std::uint64_t> max_size_;
    std::vector<std::uint8_t> done_;
    std::vector<std::int32_t> cut_;
    std::vector<Rational> cost_;
    std::vector<std::size_t> pstride_;
    std::vector<Rational> prefix_;
};

}  // namespace detail

/// Minimum PAR over all dissection protocols for the table's fixed
/// permutations, against the given ideal regions, with a protocol attaining it.
inline OptimalPar optimal_par(const FunctionTable& table, Objective objective, const Distribution& dist,
                              const RegionMap& ideal, const Limits& limits = {})
{
    limits.check_dp(table.dims(), table.bits());
    return detail::OptimalParSearch(table, objective, dist, ideal).solve();
}

inline OptimalPar optimal_par(const FunctionTable& table, Objective objective, const Distribution& dist,
                              RegionSemantics semantics = RegionSemantics::connected, const Limits& limits = {})
{
    limits.check_dp(table.dims(), table.bits());
    return optimal_par(table, objective, dist, ideal_partition(table, semantics), limits);
}

inline OptimalPar optimal_par(const FunctionTable& table, Objective objective,
                              RegionSemantics semantics = RegionSemantics::connected, const Limits& limits = {})
{
    return optimal_par(table, objective, Distribution::uniform(table.dims(), table.bits()), semantics, limits);
}

struct PermSearch {
    enum class Mode { identity, exhaustive, sample };
    // reference: ideal regions are taken from the input table and follow the
    // inputs under every other ordering. recompute: each ordering gets its own
    // ideal partition.
    enum class Regions { reference, recompute };
    Mode mode = Mode::exhaustive;
    Regions regions = Regions::reference;
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    // Largest number of permutation tuples an exhaustive sweep may visit.
    std::uint64_t budget = 1'000'000;
    unsigned threads = 1;
};

struct PermSweepResult {
    Rational best;
    std::vector<Permutation> argmin;
    ProtocolTree witness;
    bool exhaustive = false;
    std::size_t evaluated = 0;
};

/// Number of permutation tuples, or nullopt if it exceeds `cap`.
inline std::optional<std::uint64_t> perm_tuple_count(int d, int k, std::uint64_t cap)
{
    std::uint64_t fact = 1;
    for (std::uint64_t i = 2; i <= (1ull << k); ++i) {
        fact *= i;
        if (fact > cap) return std::nullopt;
    }
    std::uint64_t total = 1;
    for (int a = 0; a < d; ++a) {
        total *= fact;
        if (total > cap) return std::nullopt;
    }
    return total;
}

/// Minimum of optimal_par over permutation tuples: all of them when
/// exhaustive mode is asked for and the count fits the budget, otherwise the
/// identity plus seeded uniform samples. Ties resolve to the earliest tuple in
/// enumeration order, so the result does not depend on the thread count.
inline PermSweepResult optimal_par_over_perms(const FunctionTable& table, Objective objective, const Distribution& dist,
                                              const PermSearch& search,
                                              RegionSemantics semantics = RegionSemantics::connected,
                                              const Limits& limits = {})
{
    limits.check_dp(table.dims(), table.bits());
    const int d = table.dims();
    const auto n = static_cast<std::size_t>(table.side());
    const auto reference = ideal_partition(table, semantics);

    std::vector<std::vector<Permutation>> tuples;
    std::vector<Permutation> all;
    std::optional<std::uint64_t> count;
    PermSweepResult res;
    if (search.mode == PermSearch::Mode::exhaustive) count = perm_tuple_count(d, table.bits(), search.budget);
    if (search.mode == PermSearch::Mode::identity) {
        tuples.push_back(std::vector<Permutation>(d, Permutation::identity(n)));
    } else if (count) {
        res.exhaustive = true;
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        do all.emplace_back(order);
        while (std::next_permutation(order.begin(), order.end()));
    } else {
        tuples.push_back(std::vector<Permutation>(d, Permutation::identity(n)));
        std::mt19937_64 rng(search.seed);
        for (std::size_t s = 0; s < search.samples; ++s) {
            std::vector<Permutation> t;
            for (int a = 0; a < d; ++a) {
                std::vector<std::uint32_t> order(n);
                std::iota(order.begin(), order.end(), 0u);
                std::shuffle(order.begin(), order.end(), rng);
                t.emplace_back(std::move(order));
            }
            tuples.push_back(std::move(t));
        }
    }
    const std::size_t total = res.exhaustive ? static_cast<std::size_t>(*count) : tuples.size();
    auto tuple_at = [&](std::size_t i) {
        if (!res.exhaustive) return tuples[i];
        std::vector<Permutation> t(d);
        for (int a = d - 1; a >= 0; --a) {
            t[a] = all[i % all.size()];
            i /= all.size();
        }
        return t;
    };

    struct Best {
        std::optional<Rational> value;
        std::size_t index = 0;
        ProtocolTree witness;
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(search.threads, static_cast<unsigned>(total)));
    std::vector<Best> partial(workers);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&](unsigned w) {
        try {
            for (std::size_t i = next++; i < total; i = next++) {
                const auto permuted = table.with_perms(tuple_at(i));
                const auto ideal = search.regions == PermSearch::Regions::reference
                                       ? transport_partition(reference, table, permuted)
                                       : ideal_partition(permuted, semantics);
                auto r = optimal_par(permuted, objective, dist, ideal, limits);
                auto& b = partial[w];
                if (!b.value || r.value < *b.value || (r.value == *b.value && i < b.index)) {
                    b.value = r.value;
                    b.index = i;
                    b.witness = std::move(r.witness);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const Best* best = nullptr;
    for (const auto& b : partial) {
        if (!b.value) continue;
        if (!best || *b.value < *best->value || (*b.value == *best->value && b.index < best->index)) best = &b;
    }
    res.best = *best->value;
    res.argmin = tuple_at(best->index);
    res.witness = best->witness;
    res.evaluated = total;
    return res;
}

struct GrowthRow {
    int k = 0;
    Rational value;                 // optimal average PAR under uniform
    std::optional<Rational> ratio;  // value(k) / value(k-1)
};

/// Optimal average PAR of the three-party construction for k in [kmin, kmax].
inline std::vector<GrowthRow> threeparty_growth(int kmin, int kmax, const Limits& limits = {})
{
    if (kmin < 1 || kmax < kmin) throw ValidationError("threeparty_growth needs 1 <= kmin <= kmax");
    std::vector<GrowthRow> rows;
    for (int k = kmin; k <= kmax; ++k) {
        limits.check_dp(3, k);
        const auto inst = make({"paterson_yao_3d", k});
        GrowthRow row;
        row.k = k;
        row.value = optimal_par(inst.table, Objective::average, RegionSemantics::connected, limits).value;
        if (!rows.empty()) row.ratio = row.value / rows.back().value;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace approxpriv
