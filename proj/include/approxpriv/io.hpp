#pragma once

// JSON and CSV forms of tables, distributions, protocols, region maps, BSPs
// and PAR reports. Rationals are {num, den} integer pairs; integers too large
// for 64 bits are written as decimal strings.
//
// Table "values" hold f on input tuples (row-major, party 1's input most
// significant); the grid is obtained by applying "perms".

#include "approxpriv/bsp.hpp"
#include "approxpriv/par.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace approxpriv::io {

using json = nlohmann::json;

inline json integer_to_json(const Integer& z)
{
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

inline Integer integer_from_json(const json& j)
{
    if (j.is_number_integer()) return Integer(j.get<long>());
    if (j.is_string()) {
        Integer z;
        if (z.set_str(j.get<std::string>(), 10) != 0) throw ValidationError("bad integer '" + j.get<std::string>() + "'");
        return z;
    }
    throw ValidationError("expected an integer, got " + j.dump());
}

inline json rational_to_json(const Rational& q)
{
    return json{{"num", integer_to_json(q.get_num())}, {"den", integer_to_json(q.get_den())}};
}

inline Rational rational_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("num") || !j.contains("den")) throw ValidationError("expected {num, den}");
    const auto den = integer_from_json(j.at("den"));
    if (den == 0) throw ValidationError("zero denominator");
    return make_rational(integer_from_json(j.at("num")), den);
}

inline json rect_to_json(const HyperRect& r)
{
    json a = json::array();
    for (const auto& iv : r.axes) a.push_back({iv.lo, iv.hi});
    return a;
}

inline HyperRect rect_from_json(const json& j)
{
    HyperRect r;
    for (const auto& iv : j) {
        if (!iv.is_array() || iv.size() != 2) throw ValidationError("box axis must be [lo, hi]");
        r.axes.push_back({iv[0].get<int>(), iv[1].get<int>()});
    }
    return r;
}

// ---- tables ----

inline json table_to_json(const FunctionTable& t)
{
    json perms = json::array();
    for (const auto& p : t.perms()) perms.push_back(p.order());
    return json{{"d", t.dims()},
                {"k", t.bits()},
                {"alphabet", t.alphabet()},
                {"perms", perms},
                {"values", t.raw_values()}};
}

inline FunctionTable table_from_json(const json& j, const Limits& limits = {})
{
    try {
        const int d = j.at("d").get<int>();
        const int k = j.at("k").get<int>();
        limits.check_table(d, k);
        auto alphabet = j.at("alphabet").get<std::vector<std::string>>();
        auto values = j.at("values").get<std::vector<std::uint32_t>>();
        std::vector<Permutation> perms;
        if (j.contains("perms"))
            for (const auto& p : j.at("perms")) perms.emplace_back(p.get<std::vector<std::uint32_t>>());
        return FunctionTable(d, k, std::move(alphabet), std::move(values), std::move(perms), limits);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed table JSON: ") + e.what());
    }
}

// ---- distributions ----

inline json distribution_to_json(const Distribution& dist)
{
    if (dist.kind() == DistributionKind::uniform) return json{{"kind", "uniform"}};
    json num = json::array(), den = json::array();
    for (const auto& w : dist.weights()) {
        num.push_back(integer_to_json(w.get_num()));
        den.push_back(integer_to_json(w.get_den()));
    }
    json out{{"kind", "weights"}, {"num", num}, {"den", den}};
    if (dist.kind() == DistributionKind::c_approximate) out["c"] = rational_to_json(dist.c());
    return out;
}

inline Distribution distribution_from_json(const json& j, int d, int k)
{
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "uniform") return Distribution::uniform(d, k);
        if (kind != "weights") throw ValidationError("unknown distribution kind '" + kind + "'");
        const auto& num = j.at("num");
        const auto& den = j.at("den");
        if (num.size() != den.size()) throw ValidationError("num and den lengths differ");
        std::vector<Rational> w;
        for (std::size_t i = 0; i < num.size(); ++i) {
            const auto dd = integer_from_json(den[i]);
            if (dd == 0) throw ValidationError("zero denominator in weight " + std::to_string(i));
            w.push_back(make_rational(integer_from_json(num[i]), dd));
        }
        if (j.contains("c"))
            return Distribution::from_weights(d, k, std::move(w), DistributionKind::c_approximate,
                                              rational_from_json(j.at("c")));
        return Distribution::from_weights(d, k, std::move(w));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed distribution JSON: ") + e.what());
    }
}

// ---- protocols ----

inline json protocol_to_json(const ProtocolTree& tree)
{
    auto rec = [&](auto&& self, std::size_t idx) -> json {
        const auto& n = tree.node(idx);
        if (n.is_leaf()) return json{{"leaf", n.leaf}};
        return json{{"party", n.party}, {"cut_after", n.cut_after}, {"low", self(self, n.low)}, {"high", self(self, n.high)}};
    };
    return rec(rec, tree.root());
}

inline ProtocolTree protocol_from_json(const json& j)
{
    ProtocolTree tree;
    auto rec = [&](auto&& self, const json& node, int depth) -> std::size_t {
        if (depth > 4096) throw ValidationError("protocol JSON nested too deeply");
        if (!node.is_object()) throw ValidationError("protocol node must be an object");
        if (node.contains("leaf")) return tree.add_leaf(node.at("leaf").get<std::string>());
        if (!node.contains("party") || !node.contains("cut_after") || !node.contains("low") || !node.contains("high"))
            throw ValidationError("protocol node needs party, cut_after, low and high");
        const auto l = self(self, node.at("low"), depth + 1);
        const auto h = self(self, node.at("high"), depth + 1);
        return tree.add_cut(node.at("party").get<int>(), node.at("cut_after").get<int>(), l, h);
    };
    try {
        rec(rec, j, 0);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed protocol JSON: ") + e.what());
    }
    return tree;
}

// ---- regions, tiles, BSPs ----

inline json region_map_to_json(const RegionMap& map, const FunctionTable& table, bool with_cells = false)
{
    json regions = json::array();
    const auto cells = with_cells ? map.cells_by_region() : std::vector<std::vector<std::size_t>>{};
    for (std::uint32_t id = 0; id < map.region_count(); ++id) {
        const auto& r = map.region(id);
        json e{{"id", id}, {"value", table.symbol(r.value)}, {"size", r.size}, {"bbox", rect_to_json(r.bbox)},
               {"rectangle", r.is_rectangle}};
        if (with_cells) e["cells"] = cells[id];
        regions.push_back(std::move(e));
    }
    return json{{"semantics", map.semantics() == RegionSemantics::connected ? "connected" : "level-sets"},
                {"regions", regions}};
}

inline json tiles_to_json(const std::vector<HyperRect>& tiles, const FunctionTable& table)
{
    json out = json::array();
    for (const auto& t : tiles) {
        std::vector<int> lo;
        for (const auto& iv : t.axes) lo.push_back(iv.lo);
        out.push_back(json{{"box", rect_to_json(t)}, {"value", table.symbol(table.at(lo))}});
    }
    return out;
}

inline json bsp_to_json(const BspTree& bsp)
{
    auto rec = [&](auto&& self, std::size_t idx) -> json {
        const auto& n = bsp.node(idx);
        if (!n.is_leaf())
            return json{{"party", n.axis}, {"cut_after", n.cut_after}, {"low", self(self, n.low)}, {"high", self(self, n.high)}};
        json leaf{{"cell", rect_to_json(n.cell)}};
        if (n.fragment) leaf["fragment"] = json{{"rect", n.fragment->rect}, {"box", rect_to_json(n.fragment->box)}};
        return leaf;
    };
    const auto rep = fragment_report(bsp);
    return json{{"bounds", rect_to_json(bsp.bounds())},
                {"fragment_counts", rep.counts},
                {"leaves", bsp.leaf_count()},
                {"height", bsp.height()},
                {"tree", rec(rec, bsp.root())}};
}

// ---- reports ----

struct ReportContext {
    std::string function;
    std::string protocol;
};

inline json par_report_to_json(const ParReport& rep, const FunctionTable& table, const ReportContext& ctx)
{
    return json{{"function", ctx.function},
                {"k", table.bits()},
                {"d", table.dims()},
                {"protocol", ctx.protocol},
                {"distribution", rep.distribution},
                {"average", rational_to_json(rep.average)},
                {"worst", rational_to_json(rep.worst)},
                {"fragments", rep.fragments},
                {"region_sizes", rep.region_sizes},
                {"leaves", rep.leaves},
                {"height", rep.height},
                {"max_fragments", rep.max_fragments}};
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string par_report_csv_header()
{
    return "function,k,d,protocol,distribution,avg_num,avg_den,worst_num,worst_den,leaves,height,max_fragments";
}

inline std::string par_report_to_csv_row(const ParReport& rep, const FunctionTable& table, const ReportContext& ctx)
{
    std::ostringstream os;
    os << csv_field(ctx.function) << ',' << table.bits() << ',' << table.dims() << ',' << csv_field(ctx.protocol) << ','
       << csv_field(rep.distribution) << ',' << rep.average.get_num().get_str() << ','
       << rep.average.get_den().get_str() << ',' << rep.worst.get_num().get_str() << ','
       << rep.worst.get_den().get_str() << ',' << rep.leaves << ',' << rep.height << ',' << rep.max_fragments;
    return os.str();
}

// ---- files ----

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

}  // namespace approxpriv::io
