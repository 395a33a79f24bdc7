#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "stableform/config.hpp"
#include "stableform/errors.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kCli = STABLEFORM_CLI_PATH;

struct RunResult {
    int exit_code;
    json stdout_json;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const std::string cmd =
        std::string(kCli) + " " + args + " > " + out.string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    if (!ss.str().empty()) res.stdout_json = json::parse(ss.str(), nullptr, false);
    return res;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("stableform_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation: unknown keys and bad ranges are rejected") {
    using stableform::parse_config;
    CHECK_THROWS_AS(parse_config(json::parse(R"({"bogus": 1})")),
                    stableform::ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"alpha": 2.5})")),
                    stableform::ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"potential": {"family": "nope"}})")),
                    stableform::ConfigError);
    CHECK_THROWS_AS(
        parse_config(json::parse(R"({"potential": {"family": "custom"}})")),
        stableform::ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"spectral": {"n": 4}})")),
                    stableform::ConfigError);
    CHECK_NOTHROW(parse_config(json::parse(R"({"alpha": 1.0})")));
}

TEST_CASE("cli: empty config file is a config error (exit 2)") {
    auto dir = fresh_dir("empty");
    std::ofstream(dir / "cfg.json").close();  // zero bytes
    auto r = run_cli("--config " + (dir / "cfg.json").string() + " report", dir);
    CHECK(r.exit_code == 2);
    REQUIRE(r.stdout_json.contains("error"));
    CHECK(r.stdout_json["error"]["code"] == 2);
}

TEST_CASE("cli: unknown config key exits 2 with a machine-readable error") {
    auto dir = fresh_dir("unknown_key");
    std::ofstream(dir / "cfg.json") << R"({"frobnicate": true})";
    auto r = run_cli("--config " + (dir / "cfg.json").string() + " report", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.stdout_json["error"]["kind"] == "ConfigError");
}

TEST_CASE("cli: t51 on SubGaussian(0.25) is criterion-inapplicable (exit 4)") {
    auto dir = fresh_dir("t51");
    auto r = run_cli("--family sub_gaussian --eps 0.25 --alpha 1.0 --kind super_t51 "
                     "--points 8 --out " +
                         (dir / "out").string() + " criteria",
                     dir);
    CHECK(r.exit_code == 4);
    CHECK(r.stdout_json["error"]["kind"] == "CriterionInapplicable");
}

TEST_CASE("cli: non-integrable potential exits 3") {
    auto dir = fresh_dir("nonint");
    auto r = run_cli("--family heavy_log_tail --eps 0.5 --out " +
                         (dir / "out").string() + " report",
                     dir);
    CHECK(r.exit_code == 3);
    CHECK(r.stdout_json["error"]["kind"] == "NonIntegrable");
}

TEST_CASE("cli: gap run emits a positive gap and a parsable report") {
    auto dir = fresh_dir("gap");
    auto r = run_cli("--family poly_tail --eps 2.0 --alpha 1.0 --R 20 --n 64 --out " +
                         (dir / "out").string() + " gap",
                     dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_json["gap"]["lambda1"].get<double>() > 0.0);
    CHECK(fs::exists(dir / "out" / "gap.json"));
    CHECK(fs::exists(dir / "out" / "eigvec.csv"));
}

TEST_CASE("cli: beta run writes the curve CSV with documented columns") {
    auto dir = fresh_dir("beta");
    auto r = run_cli("--family poly_tail --eps 2.0 --alpha 1.0 --kind super_t11 "
                     "--points 8 --out " +
                         (dir / "out").string() + " beta",
                     dir);
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(dir / "out" / "curves" / "super_beta_t11.csv");
    CHECK(csv.rfind("r,value,log_value", 0) == 0);
}

TEST_CASE("cli: reports are byte-identical across reruns with the same seed") {
    auto dir = fresh_dir("repro");
    const std::string args =
        "--family poly_tail --eps 2.0 --alpha 1.0 --points 8 --seed 7 --out ";
    auto r1 = run_cli(args + (dir / "a").string() + " report", dir);
    auto r2 = run_cli(args + (dir / "b").string() + " report", dir);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    const std::string a = slurp(dir / "a" / "report.json");
    const std::string b = slurp(dir / "b" / "report.json");
    REQUIRE_FALSE(a.empty());
    CHECK(a == b);
}

TEST_CASE("cli: compare of a curve with itself reports zero differences") {
    auto dir = fresh_dir("compare");
    auto r = run_cli("--family poly_tail --eps 2.0 --alpha 1.0 --kind super_t11 "
                     "--points 8 --out " +
                         (dir / "out").string() + " beta",
                     dir);
    REQUIRE(r.exit_code == 0);
    const std::string curve = (dir / "out" / "curves" / "super_beta_t11.csv").string();
    auto c = run_cli("--out " + (dir / "out").string() + " compare " + curve + " " +
                         curve,
                     dir);
    REQUIRE(c.exit_code == 0);
    CHECK(c.stdout_json["compare"]["slope_diff"].get<double>() == 0.0);
    CHECK(c.stdout_json["compare"]["max_log_ratio"].get<double>() == 0.0);
}

TEST_CASE("cli: report embeds schema, version, and config hash") {
    auto dir = fresh_dir("hdr");
    auto r = run_cli("--family poly_tail --eps 2.0 --alpha 1.0 --points 8 --out " +
                         (dir / "out").string() + " report",
                     dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_json["schema"] == 1);
    CHECK(r.stdout_json.contains("version"));
    CHECK(r.stdout_json["config_hash"].is_string());
    CHECK(r.stdout_json["checks"]["super_poincare"]["applicable"] == true);
    const double slope = r.stdout_json["checks"]["super_poincare"]["slope"];
    CHECK(std::abs(slope + 10.0) < 0.5);
}
