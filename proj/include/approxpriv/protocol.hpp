#pragma once

// Dissection protocols as cut trees: execution, validation, the bisection
// family and the perfect-privacy constructor for Boolean tilings.

#include "approxpriv/partition.hpp"

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace approxpriv {

/// Internal nodes cut party `party`'s current interval [lo, hi] into
/// [lo, cut_after] (low child, bit 0) and [cut_after + 1, hi] (high child, bit 1).
struct ProtocolNode {
    int party = -1;
    int cut_after = 0;
    std::size_t low = 0;
    std::size_t high = 0;
    std::string leaf;

    bool is_leaf() const noexcept { return party < 0; }
};

class ProtocolTree {
public:
    std::size_t add_leaf(std::string symbol)
    {
        ProtocolNode n;
        n.leaf = std::move(symbol);
        nodes_.push_back(std::move(n));
        root_ = nodes_.size() - 1;
        return root_;
    }

    std::size_t add_cut(int party, int cut_after, std::size_t low, std::size_t high)
    {
        ProtocolNode n;
        n.party = party;
        n.cut_after = cut_after;
        n.low = low;
        n.high = high;
        nodes_.push_back(std::move(n));
        root_ = nodes_.size() - 1;
        return root_;
    }

    void set_root(std::size_t r) { root_ = r; }
    std::size_t root() const noexcept { return root_; }
    bool empty() const noexcept { return nodes_.empty(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    const ProtocolNode& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<ProtocolNode>& nodes() const noexcept { return nodes_; }

    std::size_t leaf_count() const { return count_leaves(root_); }

    // Number of communication steps on the longest root-to-leaf path.
    std::size_t height() const { return depth(root_); }

private:
    std::size_t count_leaves(std::size_t i) const
    {
        const auto& n = nodes_.at(i);
        return n.is_leaf() ? 1 : count_leaves(n.low) + count_leaves(n.high);
    }
    std::size_t depth(std::size_t i) const
    {
        const auto& n = nodes_.at(i);
        return n.is_leaf() ? 0 : 1 + std::max(depth(n.low), depth(n.high));
    }

    std::vector<ProtocolNode> nodes_;
    std::size_t root_ = 0;
};

struct Transcript {
    std::vector<std::pair<int, int>> steps;  // (party, bit)
    std::string value;

    /// "P1:0 P2:1 -> value", parties numbered from 1.
    std::string to_string() const
    {
        std::ostringstream os;
        for (const auto& [p, b] : steps) os << 'P' << (p + 1) << ':' << b << ' ';
        os << "-> " << value;
        return os.str();
    }

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

enum class ViolationKind { malformed_tree, bad_party, cut_out_of_range, unknown_symbol, non_monochromatic_leaf,
                           leaf_value_mismatch };

struct DissectionViolation {
    std::size_t node = 0;
    ViolationKind kind = ViolationKind::malformed_tree;
    std::string message;
};

namespace detail {

template <class LeafFn>
std::optional<DissectionViolation> walk_protocol(const ProtocolTree& tree, const FunctionTable& table, LeafFn&& on_leaf)
{
    if (tree.empty()) return DissectionViolation{0, ViolationKind::malformed_tree, "empty protocol tree"};
    std::vector<bool> seen(tree.size(), false);
    Transcript path;
    std::optional<DissectionViolation> bad;

    auto rec = [&](auto&& self, std::size_t idx, HyperRect rect) -> void {
        if (bad) return;
        if (idx >= tree.size()) {
            bad = DissectionViolation{idx, ViolationKind::malformed_tree, "child index out of range"};
            return;
        }
        if (seen[idx]) {
            bad = DissectionViolation{idx, ViolationKind::malformed_tree, "node reachable twice"};
            return;
        }
        seen[idx] = true;
        const auto& n = tree.node(idx);
        if (n.is_leaf()) {
            const auto id = table.find_symbol(n.leaf);
            if (!id) {
                bad = DissectionViolation{idx, ViolationKind::unknown_symbol, "leaf symbol '" + n.leaf + "' not in alphabet"};
                return;
            }
            if (!table.is_monochromatic(rect)) {
                bad = DissectionViolation{idx, ViolationKind::non_monochromatic_leaf, "leaf rectangle is not monochromatic"};
                return;
            }
            std::vector<int> lo;
            for (const auto& iv : rect.axes) lo.push_back(iv.lo);
            if (table.at(lo) != *id) {
                bad = DissectionViolation{idx, ViolationKind::leaf_value_mismatch,
                                          "leaf outputs '" + n.leaf + "' but f is '" + table.symbol(table.at(lo)) + "'"};
                return;
            }
            path.value = n.leaf;
            on_leaf(idx, rect, *id, path);
            return;
        }
        if (n.party >= table.dims()) {
            bad = DissectionViolation{idx, ViolationKind::bad_party, "party " + std::to_string(n.party) + " does not exist"};
            return;
        }
        const auto& iv = rect[n.party];
        if (n.cut_after < iv.lo || n.cut_after >= iv.hi) {
            bad = DissectionViolation{idx, ViolationKind::cut_out_of_range,
                                      "cut after " + std::to_string(n.cut_after) + " outside [" + std::to_string(iv.lo) +
                                          ", " + std::to_string(iv.hi) + ")"};
            return;
        }
        auto [lo, hi] = rect.split(n.party, n.cut_after);
        path.steps.emplace_back(n.party, 0);
        self(self, n.low, lo);
        path.steps.back().second = 1;
        self(self, n.high, hi);
        path.steps.pop_back();
    };
    rec(rec, tree.root(), table.shape().bounds());
    return bad;
}

}  // namespace detail

/// Checks every tree invariant against the table; reports the first violation.
inline std::optional<DissectionViolation> validate_dissection(const ProtocolTree& tree, const FunctionTable& table)
{
    return detail::walk_protocol(tree, table, [](auto&&...) {});
}

struct ProtocolLeaf {
    std::size_t node = 0;
    HyperRect rect;
    std::uint32_t value = 0;
    Transcript transcript;
};

/// Result of running a protocol: the induced monochromatic tiling, with
/// leaves[i] describing induced region i.
struct ProtocolRun {
    RegionMap induced;
    std::vector<ProtocolLeaf> leaves;

    const Transcript& transcript(std::size_t cell) const { return leaves[induced.region_at(cell)].transcript; }
    const ProtocolLeaf& leaf_of(std::size_t cell) const { return leaves[induced.region_at(cell)]; }
};

inline ProtocolRun run_protocol(const ProtocolTree& tree, const FunctionTable& table)
{
    const auto& shape = table.shape();
    std::vector<ProtocolLeaf> raw;
    std::vector<std::uint32_t> label(shape.cells(), 0);
    auto bad = detail::walk_protocol(tree, table, [&](std::size_t idx, const HyperRect& rect, std::uint32_t v, const Transcript& t) {
        const auto id = static_cast<std::uint32_t>(raw.size());
        raw.push_back({idx, rect, v, t});
        shape.for_each_cell(rect, [&](std::size_t c) { label[c] = id; });
    });
    if (bad) throw ProtocolError(bad->node, bad->message);

    ProtocolRun run;
    run.induced = RegionMap::from_labels(shape, label, table.grid_values(), RegionSemantics::connected);
    run.leaves.resize(raw.size());
    for (auto& leaf : raw) {
        const auto id = run.induced.region_at(shape.flat(std::vector<int>([&] {
            std::vector<int> lo;
            for (const auto& iv : leaf.rect.axes) lo.push_back(iv.lo);
            return lo;
        }())));
        run.leaves[id] = std::move(leaf);
    }
    return run;
}

/// Whether the block's values change along axis a somewhere.
inline bool is_informative(const FunctionTable& table, const HyperRect& block, int a)
{
    if (block[a].length() < 2) return false;
    const auto stride = table.shape().stride(a);
    bool varies = false;
    table.shape().for_each_cell(block, [&](std::size_t c) {
        if (!varies && table.shape().coord(c, a) < block[a].hi && table.at(c) != table.at(c + stride)) varies = true;
    });
    return varies;
}

struct BisectionVariant {
    enum class Kind { bisection, c_bisection, bounded };
    Kind kind = Kind::bisection;
    Rational c = make_rational(1, 2);
    int g = 0;

    static BisectionVariant plain() { return {}; }
    static BisectionVariant with_c(Rational c) { return {Kind::c_bisection, std::move(c), 0}; }
    static BisectionVariant bounded(int g) { return {Kind::bounded, make_rational(1, 2), g}; }
};

// synchronized: every party informative at the start of a round cuts once in
// that round (default).
// alternating: one cut per step, parties taking turns, uninformative ones skipped.
enum class Scheduling { synchronized, alternating };

namespace detail {

class BisectionBuilder {
public:
    BisectionBuilder(const FunctionTable& table, BisectionVariant v, Scheduling s)
        : table_(table), variant_(std::move(v)), scheduling_(s)
    {}

    ProtocolTree build()
    {
        const auto d = table_.dims();
        if (scheduling_ == Scheduling::synchronized)
            sync(table_.shape().bounds(), 0);
        else
            alternate(table_.shape().bounds(), 0, std::vector<int>(d, 0));
        return std::move(tree_);
    }

private:
    std::optional<std::size_t> leaf_if_mono(const HyperRect& b)
    {
        if (!table_.is_monochromatic(b)) return std::nullopt;
        std::vector<int> lo;
        for (const auto& iv : b.axes) lo.push_back(iv.lo);
        return tree_.add_leaf(table_.symbol(table_.at(lo)));
    }

    int split_point(const Interval& iv, int round) const
    {
        const int z = iv.length();
        int first = 0;
        switch (variant_.kind) {
        case BisectionVariant::Kind::bisection: first = (z + 1) / 2; break;
        case BisectionVariant::Kind::c_bisection: {
            Rational cz = variant_.c * z;
            Integer ceil_cz;
            mpz_cdiv_q(ceil_cz.get_mpz_t(), cz.get_num_mpz_t(), cz.get_den_mpz_t());
            first = static_cast<int>(ceil_cz.get_si());
            break;
        }
        case BisectionVariant::Kind::bounded: first = round < variant_.g ? (z + 1) / 2 : 1; break;
        }
        first = std::clamp(first, 1, z - 1);
        return iv.lo + first - 1;
    }

    // One round: the parties informative at the start of the round each cut
    // once, in party order; sub-blocks are checked for a leaf after the round.
    std::size_t sync(const HyperRect& b, int round)
    {
        if (auto leaf = leaf_if_mono(b)) return *leaf;
        std::vector<int> movers;
        for (int a = 0; a < table_.dims(); ++a)
            if (is_informative(table_, b, a)) movers.push_back(a);
        if (movers.empty()) throw InternalError("non-monochromatic block with no informative party");
        return round_step(b, movers, 0, round);
    }

    std::size_t round_step(const HyperRect& b, const std::vector<int>& movers, std::size_t i, int round)
    {
        if (i == movers.size()) return sync(b, round + 1);
        const int party = movers[i];
        const int m = split_point(b[party], round);
        auto [lo, hi] = b.split(party, m);
        const auto l = round_step(lo, movers, i + 1, round);
        const auto h = round_step(hi, movers, i + 1, round);
        return tree_.add_cut(party, m, l, h);
    }

    std::size_t alternate(const HyperRect& b, int next, std::vector<int> cuts)
    {
        if (auto leaf = leaf_if_mono(b)) return *leaf;
        const int d = table_.dims();
        int party = next;
        for (int i = 0; i < d && !is_informative(table_, b, party); ++i) party = (party + 1) % d;
        const int m = split_point(b[party], cuts[party]);
        ++cuts[party];
        auto [lo, hi] = b.split(party, m);
        const auto l = alternate(lo, (party + 1) % d, cuts);
        const auto h = alternate(hi, (party + 1) % d, cuts);
        return tree_.add_cut(party, m, l, h);
    }

    const FunctionTable& table_;
    BisectionVariant variant_;
    Scheduling scheduling_;
    ProtocolTree tree_;
};

}  // namespace detail

inline ProtocolTree bisection_family(const FunctionTable& table, const BisectionVariant& variant = {},
                                     Scheduling scheduling = Scheduling::synchronized)
{
    if (variant.kind == BisectionVariant::Kind::c_bisection && (variant.c < make_rational(1, 2) || variant.c >= 1))
        throw ValidationError("c-bisection needs 1/2 <= c < 1, got " + to_string(variant.c));
    if (variant.kind == BisectionVariant::Kind::bounded && (variant.g < 0 || variant.g > table.bits()))
        throw ValidationError("bounded bisection needs 0 <= g <= k, got g=" + std::to_string(variant.g));
    return detail::BisectionBuilder(table, variant, scheduling).build();
}

class NotBooleanTiling : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Perfectly private protocol for a two-party Boolean tiling function:
/// repeatedly cut along a line that splits no tile (row cuts first, lowest
/// coordinate first). Throws InternalError if a non-monochromatic block has
/// no such line.
inline ProtocolTree perfect_boolean_protocol(const FunctionTable& table)
{
    if (table.dims() != 2) throw NotBooleanTiling("perfect Boolean protocol needs exactly two parties");
    std::vector<bool> used(table.alphabet().size(), false);
    std::size_t distinct = 0;
    for (auto v : table.grid_values())
        if (!used[v]) {
            used[v] = true;
            ++distinct;
        }
    if (distinct > 2) throw NotBooleanTiling("table has " + std::to_string(distinct) + " output values");
    const auto regions = ideal_partition(table);
    const auto info = tiling_info(regions);
    if (!info.is_tiling)
        throw NotBooleanTiling("ideal region " + std::to_string(*info.witness) + " is not a rectangle");

    ProtocolTree tree;
    const auto& shape = table.shape();
    auto rec = [&](auto&& self, const HyperRect& b) -> std::size_t {
        std::vector<int> lo;
        for (const auto& iv : b.axes) lo.push_back(iv.lo);
        if (table.is_monochromatic(b)) return tree.add_leaf(table.symbol(table.at(lo)));
        std::vector<bool> inside(regions.region_count(), false);
        std::vector<std::uint32_t> tiles;
        shape.for_each_cell(b, [&](std::size_t c) {
            const auto r = regions.region_at(c);
            if (!inside[r]) {
                inside[r] = true;
                tiles.push_back(r);
            }
        });
        for (int a = 0; a < 2; ++a) {
            std::vector<bool> blocked(static_cast<std::size_t>(b[a].length()), false);
            for (auto r : tiles) {
                const auto& bb = regions.region(r).bbox[a];
                for (int m = bb.lo; m < bb.hi; ++m) blocked[m - b[a].lo] = true;
            }
            for (int m = b[a].lo; m < b[a].hi; ++m) {
                if (blocked[m - b[a].lo]) continue;
                auto [l, h] = b.split(a, m);
                const auto li = self(self, l);
                const auto hi = self(self, h);
                return tree.add_cut(a, m, li, hi);
            }
        }
        throw InternalError("Boolean tiling block has no tile-preserving cut; the perfect-privacy construction failed");
    };
    rec(rec, shape.bounds());
    return tree;
}

/// A uniformly random valid dissection: at each non-monochromatic block a
/// random party with a splittable interval cuts at a random position.
inline ProtocolTree random_dissection(const FunctionTable& table, std::mt19937_64& rng)
{
    ProtocolTree tree;
    auto rec = [&](auto&& self, const HyperRect& b) -> std::size_t {
        std::vector<int> lo;
        for (const auto& iv : b.axes) lo.push_back(iv.lo);
        if (table.is_monochromatic(b)) return tree.add_leaf(table.symbol(table.at(lo)));
        std::vector<int> parties;
        for (int a = 0; a < table.dims(); ++a)
            if (b[a].length() > 1) parties.push_back(a);
        const int a = parties[std::uniform_int_distribution<std::size_t>(0, parties.size() - 1)(rng)];
        const int m = std::uniform_int_distribution<int>(b[a].lo, b[a].hi - 1)(rng);
        auto [l, h] = b.split(a, m);
        const auto li = self(self, l);
        const auto hi = self(self, h);
        return tree.add_cut(a, m, li, hi);
    };
    rec(rec, table.shape().bounds());
    return tree;
}

/// Copy of `tree` in which leaf `leaf_node` is replaced by a cut of `party`
/// after `cut_after` with two leaves of the same value.
inline ProtocolTree refine_leaf(const ProtocolTree& tree, std::size_t leaf_node, int party, int cut_after)
{
    ProtocolTree out;
    auto rec = [&](auto&& self, std::size_t idx) -> std::size_t {
        const auto& n = tree.node(idx);
        if (n.is_leaf()) {
            if (idx != leaf_node) return out.add_leaf(n.leaf);
            const auto l = out.add_leaf(n.leaf);
            const auto h = out.add_leaf(n.leaf);
            return out.add_cut(party, cut_after, l, h);
        }
        const auto l = self(self, n.low);
        const auto h = self(self, n.high);
        return out.add_cut(n.party, n.cut_after, l, h);
    };
    rec(rec, tree.root());
    return out;
}

}  // namespace approxpriv
