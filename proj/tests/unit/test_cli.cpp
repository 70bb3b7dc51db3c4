#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glauber/experiment.hpp"

using namespace glauber;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GLAUBER_CONFIG_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("glauber_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

struct CliResult {
    int code;
    std::string err;
};

CliResult cli(const std::string& args, const fs::path& workdir) {
    const fs::path err = workdir / "stderr.txt";
    const std::string cmd = std::string("\"") + GLAUBER_CLI_PATH + "\" " + args + " >/dev/null 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::string first_kind(const std::string& text) {
    auto cfg = parse_config(text);
    auto d = validate(cfg);
    return d.empty() ? "" : d.front().kind;
}

}  // namespace

TEST_CASE("config parsing errors") {
    CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
    try {
        parse_config("{\"experiment\": 3");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == "malformed_json");
    }
    try {
        parse_config(R"({"experiment": "bogus"})");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == "unknown_experiment");
    }
    CHECK_THROWS_AS(parse_config(R"({"seed": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "exact", "replicas": 0})"), ConfigError);
}

TEST_CASE("validation diagnostics") {
    CHECK(first_kind(R"({"experiment": "exact",
        "graph": {"kind": "complete", "params": {"n": 3}},
        "system": {"system": "coloring", "q": 2}})") == "empty_feasible_set");
    CHECK(first_kind(R"({"experiment": "distinguisher",
        "graph": {"kind": "path", "params": {"n": 2}},
        "system": {"system": "ising", "beta": 0.5}})") == "requires_delta");
    auto cfg = parse_config(R"({"experiment": "exact", "cap": 1000,
        "graph": {"kind": "empty", "params": {"n": 20}},
        "system": {"system": "product_coin"}})");
    auto d = validate(cfg);
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == "cap_exceeded");
    CHECK(d[0].detail.find("1000") != std::string::npos);
    CHECK(first_kind(R"({"experiment": "exact",
        "graph": {"kind": "moebius", "params": {"n": 3}},
        "system": {"system": "ising"}})") == "bad_graph");
    CHECK(first_kind(R"({"experiment": "simulate", "t": 1, "initial": [1, 1, 0],
        "graph": {"kind": "path", "params": {"n": 3}},
        "system": {"system": "hardcore"}})") == "infeasible_configuration");
    CHECK(first_kind(R"({"experiment": "frozen", "v": 21, "R": 20, "T": 0.5,
        "x0": {"repeat": [0, 1, 2]}, "y0": {"repeat": [1, 2, 0]},
        "graph": {"kind": "path", "params": {"n": 43}},
        "system": {"system": "coloring", "q": 3}})") == "bad_field");
}

TEST_CASE("shipped presets validate") {
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(kConfigs)) {
        if (e.path().extension() != ".json") continue;
        ++count;
        auto diags = validate(load_config(e.path()));
        INFO(e.path().string());
        CHECK(diags.empty());
    }
    CHECK(count >= 8);
}

TEST_CASE("hypercube output is monotone") {
    auto out = compute_outputs(load_config(kConfigs / "hypercube.json"));
    std::istringstream in(out.at("tv_curve.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "time,tv");
    double prev = 2.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const double tv = std::stod(line.substr(line.find(',') + 1));
        CHECK(tv <= prev + 1e-15);
        prev = tv;
        ++rows;
    }
    CHECK(rows == 25);
}

TEST_CASE("exact experiment outputs") {
    auto out = compute_outputs(load_config(kConfigs / "exact_ising_c5.json"));
    REQUIRE(out.count("mixing.csv"));
    REQUIRE(out.count("spectrum.csv"));
    REQUIRE(out.count("tv_curve.csv"));
    CHECK(out["mixing.csv"].rfind("kind,tau\n", 0) == 0);
    CHECK(out["spectrum.csv"].rfind("k,lambda,alpha\n", 0) == 0);
    std::istringstream sp(out["spectrum.csv"]);
    std::string header, first;
    std::getline(sp, header);
    std::getline(sp, first);
    const auto c1 = first.find(','), c2 = first.rfind(',');
    CHECK(std::abs(std::stod(first.substr(c1 + 1, c2 - c1 - 1))) < 1e-9);
    CHECK(std::stod(first.substr(c2 + 1)) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("CLI exit codes and atomic outputs") {
    const fs::path dir = scratch_dir("codes");
    {
        std::ofstream(dir / "bad.json") << "{ broken";
    }
    auto r = cli("run --config \"" + (dir / "bad.json").string() + "\" --out \"" + (dir / "o1").string() + "\"", dir);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("glauber: error kind=malformed_json detail=\"", 0) == 0);
    CHECK_FALSE(fs::exists(dir / "o1"));

    auto v = cli("validate --config \"" + (kConfigs / "frozen_p43.json").string() + "\"", dir);
    CHECK(v.code == 0);

    {
        std::ofstream(dir / "rigid.json") << R"({"experiment": "exact",
            "graph": {"kind": "cycle", "params": {"n": 6}},
            "system": {"system": "coloring", "q": 3}})";
    }
    auto rt = cli("run --config \"" + (dir / "rigid.json").string() + "\" --out \"" + (dir / "o2").string() + "\"", dir);
    CHECK(rt.code == 3);
    CHECK(rt.err.find("kind=runtime") != std::string::npos);
    REQUIRE(fs::exists(dir / "o2" / "manifest.json"));
    auto m = Json::parse(slurp(dir / "o2" / "manifest.json"));
    CHECK(m["status"] == "error");
    CHECK_FALSE(fs::exists(dir / "o2" / "mixing.csv"));

    auto usage = cli("run", dir);
    CHECK(usage.code == 2);
}

TEST_CASE("double run is byte identical") {
    const fs::path dir = scratch_dir("repro");
    for (const char* preset : {"simulate_hardcore.json", "couple_ising.json", "frozen_p43.json"}) {
        const fs::path a = dir / (std::string(preset) + ".a"), b = dir / (std::string(preset) + ".b");
        const std::string base = "run --config \"" + (kConfigs / preset).string() + "\" --seed 99 --out ";
        REQUIRE(cli(base + "\"" + a.string() + "\"", dir).code == 0);
        REQUIRE(cli(base + "\"" + b.string() + "\"", dir).code == 0);
        auto ma = Json::parse(slurp(a / "manifest.json"));
        CHECK(ma["status"] == "ok");
        CHECK(ma["seed"] == 99);
        std::size_t csvs = 0;
        for (const auto& e : fs::directory_iterator(a)) {
            if (e.path().extension() != ".csv") continue;
            ++csvs;
            const std::string body = slurp(e.path());
            CHECK(body == slurp(b / e.path().filename()));
            CHECK(ma["outputs"][e.path().filename().string()]["sha256"] == sha256_hex(body));
        }
        CHECK(csvs == 1);
        for (const auto& e : fs::directory_iterator(a))
            CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
    }
}

TEST_CASE("sha256 of a known string") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
