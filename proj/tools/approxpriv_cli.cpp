#include "approxpriv/approxpriv.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace approxpriv;
using json = io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string after_colon(const std::string& s) { return s.substr(s.find(':') + 1); }

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        io::write_text_file(path, text);
}

RegionSemantics parse_regions(const std::string& s)
{
    if (s == "connected") return RegionSemantics::connected;
    if (s == "level-sets") return RegionSemantics::level_sets;
    throw ValidationError("--regions must be connected or level-sets");
}

Distribution parse_dist(const std::string& s, const FunctionTable& t, std::uint64_t seed)
{
    if (s == "uniform") return Distribution::uniform(t.dims(), t.bits());
    if (starts_with(s, "capprox:")) return random_c_approx_distribution(t.dims(), t.bits(), parse_rational(after_colon(s)), seed);
    if (starts_with(s, "file:")) return io::distribution_from_json(io::read_json_file(after_colon(s)), t.dims(), t.bits());
    throw ValidationError("unknown distribution '" + s + "'");
}

ProtocolTree parse_protocol(const std::string& s, const FunctionTable& t, RegionSemantics semantics)
{
    if (s == "bisection") return bisection_family(t);
    if (starts_with(s, "c-bisection:")) return bisection_family(t, BisectionVariant::with_c(parse_rational(after_colon(s))));
    if (starts_with(s, "bounded:")) {
        const auto g = after_colon(s);
        try {
            return bisection_family(t, BisectionVariant::bounded(std::stoi(g)));
        } catch (const std::logic_error&) {
            throw ValidationError("bad g in '" + s + "'");
        }
    }
    if (s == "bsp") return bsp_protocol(t, semantics);
    if (s == "perfect") return perfect_boolean_protocol(t);
    if (starts_with(s, "file:")) {
        auto tree = io::protocol_from_json(io::read_json_file(after_colon(s)));
        if (auto bad = validate_dissection(tree, t)) throw ProtocolError(bad->node, bad->message);
        return tree;
    }
    throw ValidationError("unknown protocol '" + s + "'");
}

PermSearch parse_perms(const std::string& s)
{
    PermSearch p;
    if (s == "identity")
        p.mode = PermSearch::Mode::identity;
    else if (s == "exhaustive")
        p.mode = PermSearch::Mode::exhaustive;
    else if (starts_with(s, "sample:")) {
        p.mode = PermSearch::Mode::sample;
        try {
            p.samples = std::stoul(after_colon(s));
        } catch (const std::logic_error&) {
            throw ValidationError("bad sample count in '" + s + "'");
        }
    } else {
        throw ValidationError("--perms must be identity, exhaustive or sample:<n>");
    }
    return p;
}

std::string label_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

struct Options {
    std::string name, out, tiles_out, table, protocol = "bisection", dist = "uniform", objective = "avg";
    std::string regions = "connected", perms = "identity", perm_regions = "reference", format = "json";
    std::string witness, suite = "quick", overlay = "none", verify_format = "text";
    int k = 2, g = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

int cmd_gen(const Options& o)
{
    const auto inst = make({o.name, o.k, o.g, o.seed});
    emit(o.out, io::table_to_json(inst.table).dump(2) + "\n");
    if (!o.tiles_out.empty()) {
        if (!inst.tiles) throw ValidationError("'" + o.name + "' has no tile list");
        io::write_text_file(o.tiles_out, io::tiles_to_json(*inst.tiles, inst.table).dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_analyze(const Options& o)
{
    const auto t = io::table_from_json(io::read_json_file(o.table));
    const auto semantics = parse_regions(o.regions);
    const auto tree = parse_protocol(o.protocol, t, semantics);
    const auto rep = compute_par(t, tree, parse_dist(o.dist, t, o.seed), semantics);
    const io::ReportContext ctx{label_of(o.table), o.protocol};
    if (o.format == "csv")
        emit(o.out, io::par_report_csv_header() + "\n" + io::par_report_to_csv_row(rep, t, ctx) + "\n");
    else {
        auto j = io::par_report_to_json(rep, t, ctx);
        j["diagonal_contacts"] = diagonal_contacts(t, ideal_partition(t, semantics));
        emit(o.out, j.dump(2) + "\n");
    }
    if (!o.witness.empty()) io::write_text_file(o.witness, io::protocol_to_json(tree).dump(2) + "\n");
    return kExitOk;
}

int cmd_optimize(const Options& o)
{
    const auto t = io::table_from_json(io::read_json_file(o.table));
    const auto semantics = parse_regions(o.regions);
    const auto dist = parse_dist(o.dist, t, o.seed);
    if (o.objective != "avg" && o.objective != "worst") throw ValidationError("--objective must be avg or worst");
    const auto objective = o.objective == "avg" ? Objective::average : Objective::worst;
    auto search = parse_perms(o.perms);
    search.seed = o.seed;
    search.threads = o.threads;
    if (o.perm_regions == "recompute")
        search.regions = PermSearch::Regions::recompute;
    else if (o.perm_regions != "reference")
        throw ValidationError("--perm-regions must be reference or recompute");
    const auto res = optimal_par_over_perms(t, objective, dist, search, semantics);

    json perms = json::array();
    for (const auto& p : res.argmin) perms.push_back(p.order());
    json out{{"function", label_of(o.table)},
             {"objective", o.objective},
             {"distribution", dist.describe()},
             {"value", io::rational_to_json(res.best)},
             {"perms", perms},
             {"exhaustive", res.exhaustive},
             {"evaluated", res.evaluated}};
    if (o.format == "csv")
        emit(o.out, "function,objective,value_num,value_den,evaluated\n" + io::csv_field(label_of(o.table)) + "," +
                        o.objective + "," + res.best.get_num().get_str() + "," + res.best.get_den().get_str() + "," +
                        std::to_string(res.evaluated) + "\n");
    else
        emit(o.out, out.dump(2) + "\n");
    if (!o.witness.empty()) io::write_text_file(o.witness, io::protocol_to_json(res.witness).dump(2) + "\n");
    return kExitOk;
}

int cmd_render(const Options& o)
{
    const auto t = io::table_from_json(io::read_json_file(o.table));
    const auto semantics = parse_regions(o.regions);
    const auto regions = ideal_partition(t, semantics);
    std::optional<ProtocolTree> tree;
    if (o.overlay != "none") tree = parse_protocol(o.overlay, t, semantics);
    emit(o.out, render_svg(t, regions, tree ? &*tree : nullptr));
    return kExitOk;
}

int cmd_verify(const Options& o)
{
    if (o.suite != "quick" && o.suite != "paper") throw ValidationError("--suite must be quick or paper");
    const auto suite = o.suite == "paper" ? Suite::paper : Suite::quick;
    const bool as_json = o.verify_format == "json";
    json results = json::array();
    bool ok = true;
    run_suite(suite, o.threads, [&](const VerifySuiteResult& r) {
        ok = ok && r.pass;
        if (as_json) {
            results.push_back(json{{"id", r.id}, {"claim", r.claim}, {"computed", r.computed}, {"pass", r.pass},
                                   {"seconds", r.seconds}, {"notes", r.notes}});
            return;
        }
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.claim << "\n       computed: " << r.computed
                  << "  (" << r.seconds << " s)\n";
        for (const auto& n : r.notes) std::cout << "       note: " << n << "\n";
        std::cout.flush();
    });
    if (as_json) emit(o.out, results.dump(2) + "\n");
    return ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Privacy approximation ratios of dissection protocols"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "Write a gallery function table as JSON");
    gen->add_option("--name", o.name, "Gallery entry")->required()->check(CLI::IsMember(gallery_names()));
    gen->add_option("--k", o.k, "Input bits per party");
    gen->add_option("--g", o.g, "Bounded-bisection parameter (f2)");
    gen->add_option("--seed", o.seed, "Seed for random entries");
    gen->add_option("--out", o.out, "Output path (default stdout)");
    gen->add_option("--tiles", o.tiles_out, "Also write the intended tile list here");

    auto add_common = [&](CLI::App* c) {
        c->add_option("--table", o.table, "Function table JSON")->required();
        c->add_option("--regions", o.regions, "connected | level-sets");
        c->add_option("--dist", o.dist, "uniform | capprox:<c> | file:<path>");
        c->add_option("--seed", o.seed, "Seed for sampled distributions and orderings");
        c->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--out", o.out, "Output path (default stdout)");
    };

    auto* analyze = app.add_subcommand("analyze", "PAR of a protocol on a table");
    add_common(analyze);
    analyze->add_option("--protocol", o.protocol, "bisection | c-bisection:<c> | bounded:<g> | bsp | perfect | file:<path>");
    analyze->add_option("--save-protocol", o.witness, "Write the protocol tree JSON here");

    auto* optimize = app.add_subcommand("optimize", "Optimal PAR over dissection protocols");
    add_common(optimize);
    optimize->add_option("--objective", o.objective, "avg | worst");
    optimize->add_option("--perms", o.perms, "identity | exhaustive | sample:<n>");
    optimize->add_option("--perm-regions", o.perm_regions, "reference | recompute");
    optimize->add_option("--threads", o.threads, "Worker threads for the ordering sweep")->check(CLI::PositiveNumber);
    optimize->add_option("--witness", o.witness, "Write an optimal protocol JSON here");

    auto* render = app.add_subcommand("render", "SVG of a table with optional protocol overlay");
    render->add_option("--table", o.table, "Function table JSON")->required();
    render->add_option("--protocol", o.overlay, "none or any analyze protocol spec");
    render->add_option("--regions", o.regions, "connected | level-sets");
    render->add_option("--out", o.out, "Output path (default stdout)");

    auto* verify = app.add_subcommand("verify", "Run the reproduction checks");
    verify->add_option("--suite", o.suite, "quick | paper");
    verify->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--format", o.verify_format, "text | json")->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--out", o.out, "JSON output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*analyze) return cmd_analyze(o);
        if (*optimize) return cmd_optimize(o);
        if (*render) return cmd_render(o);
        if (*verify) return cmd_verify(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const LimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
