#include "approxpriv/io.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using approxpriv::io::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path workdir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("approxpriv_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run cli(const std::string& args)
{
    const char* exe = std::getenv("APPROXPRIV_CLI");
    REQUIRE(exe != nullptr);
    const auto out = workdir() / "stdout.txt";
    const std::string cmd = std::string("\"") + exe + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("gen writes tables and tile lists")
{
    auto r = cli("gen --name equality --k 3 --out " + path("eq3.json"));
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(path("eq3.json")));
    CHECK(j["k"] == 3);
    CHECK(j["values"].size() == 64);

    r = cli("gen --name paterson_yao_3d --k 2 --tiles " + path("py_tiles.json"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["d"] == 3);
    CHECK(json::parse(slurp(path("py_tiles.json"))).size() == 28);

    CHECK(cli("gen --name hless --k 3").code == 2);
    CHECK(cli("gen --name nonsense --k 2").code == 2);
    CHECK(cli("gen --name equality --k 12").code == 2);
}

TEST_CASE("analyze reports exact PAR values")
{
    REQUIRE(cli("gen --name equality --k 3 --out " + path("eq3.json")).code == 0);
    auto r = cli("analyze --table " + path("eq3.json") + " --protocol bisection --dist uniform");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["average"] == json{{"num", 25}, {"den", 4}});
    CHECK(j["worst"] == json{{"num", 28}, {"den", 1}});

    r = cli("analyze --table " + path("eq3.json") + " --protocol bisection --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("eq3,3,2,bisection,uniform,25,4,28,1,") != std::string::npos);

    REQUIRE(cli("gen --name constant --k 2 --out " + path("const.json")).code == 0);
    r = cli("analyze --table " + path("const.json") + " --protocol bsp --dist capprox:1/2 --seed 4");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["average"] == json{{"num", 1}, {"den", 1}});

    REQUIRE(cli("gen --name notile --k 2 --out " + path("notile.json")).code == 0);
    r = cli("analyze --table " + path("notile.json") + " --protocol bsp --save-protocol " + path("bsp.json"));
    REQUIRE(r.code == 0);
    const auto avg = approxpriv::io::rational_from_json(json::parse(r.out)["average"]);
    CHECK(avg <= 4);
    r = cli("analyze --table " + path("notile.json") + " --protocol file:" + path("bsp.json"));
    REQUIRE(r.code == 0);
    CHECK(approxpriv::io::rational_from_json(json::parse(r.out)["average"]) == avg);

    CHECK(cli("analyze --table " + path("eq3.json") + " --protocol perfect").code == 2);
    CHECK(cli("analyze --table " + path("eq3.json") + " --protocol file:" + path("bsp.json")).code == 2);
    CHECK(cli("analyze --table " + path("missing.json")).code == 2);
    CHECK(cli("analyze --table " + path("eq3.json") + " --dist capprox:2").code == 2);
}

TEST_CASE("optimize returns the optimum and a witness")
{
    REQUIRE(cli("gen --name notile --k 2 --out " + path("notile.json")).code == 0);
    auto r = cli("optimize --table " + path("notile.json") + " --objective avg --perms exhaustive --threads 2 --witness " +
                 path("w.json"));
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["value"] == json{{"num", 9}, {"den", 8}});
    CHECK(j["evaluated"] == 576);
    CHECK(fs::exists(path("w.json")));

    r = cli("optimize --table " + path("notile.json") + " --perms exhaustive --perm-regions recompute");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["value"] == json{{"num", 1}, {"den", 1}});

    REQUIRE(cli("gen --name random_boolean_tiling --k 3 --seed 5 --out " + path("bt.json")).code == 0);
    r = cli("optimize --table " + path("bt.json") + " --objective worst");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["value"] == json{{"num", 1}, {"den", 1}});

    CHECK(cli("optimize --table " + path("notile.json") + " --objective median").code == 2);
    CHECK(cli("optimize --table " + path("notile.json") + " --perms some").code == 2);
}

TEST_CASE("render is deterministic")
{
    REQUIRE(cli("gen --name set_covering --k 2 --out " + path("sc.json")).code == 0);
    REQUIRE(cli("render --table " + path("sc.json") + " --protocol bisection --out " + path("a.svg")).code == 0);
    REQUIRE(cli("render --table " + path("sc.json") + " --protocol bisection --out " + path("b.svg")).code == 0);
    CHECK(slurp(path("a.svg")) == slurp(path("b.svg")));
    CHECK(slurp(path("a.svg")).rfind("<svg", 0) == 0);
}

TEST_CASE("verify exit code reflects the check results")
{
    const auto r = cli("verify --suite quick --format json");
    REQUIRE((r.code == 0 || r.code == 3));
    const auto j = json::parse(r.out);
    REQUIRE(j.size() == 9);
    bool all = true;
    for (const auto& c : j) all = all && c["pass"].get<bool>();
    CHECK(r.code == (all ? 0 : 3));
    CHECK(cli("verify --suite huge").code == 2);
}
