#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "optomech/io/cli.hpp"
#include "support/paths.hpp"

using namespace optomech::io;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "optomech");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "optomech_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Cli, NoArgumentsIsUsageError) {
    const CliRun r = invoke({});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("sweep"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndMissingConfig) {
    EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep"}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--format", "xml"}).code, kExitUsage);
}

TEST(Cli, ValidateBundledConfig) {
    const CliRun r = invoke({"validate", "--config", config_path("landscape_coherent.toml")});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.err.find("ok"), std::string::npos);
}

TEST(Cli, BadConfigIsUsageError) {
    const fs::path p = scratch("bad.toml");
    std::ofstream(p) << "[device]\nkappa_a_hz = -3\n";
    const CliRun r = invoke({"validate", "--config", p.string()});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("config error"), std::string::npos);
    EXPECT_EQ(invoke({"validate", "--config", "/nonexistent.toml"}).code, kExitUsage);
}

TEST(Cli, SurvivalTemperature) {
    const CliRun r = invoke({"survival-temp", "--config", config_path("survival_coherent.toml"), "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["temperature_k"].get<double>(), 8.5, 0.3);
    EXPECT_FALSE(j["saturated"].get<bool>());
}

TEST(Cli, SurvivalTMaxOverride) {
    const CliRun r = invoke({"survival-temp", "--config", config_path("survival_coherent.toml"), "--t-max", "2"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("saturated"), std::string::npos);
}

TEST(Cli, SweepHeaderAndGridOverride) {
    const fs::path csv = scratch("dissipative_small.csv");
    const CliRun r = invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "4x5", "--out", csv.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::istringstream in(slurp(csv));
    const CsvTable t = read_csv(in);
    EXPECT_EQ(t.header, (std::vector<std::string>{"delta_s_over_omega_m", "g_kappa_hz", "x_s", "stable", "E_N"}));
    EXPECT_EQ(t.rows.size(), 20u);
    EXPECT_NE(r.err.find("20 points"), std::string::npos);
}

TEST(Cli, SweepOutputIndependentOfJobs) {
    const fs::path a = scratch("jobs1.csv"), b = scratch("jobs4.csv");
    ASSERT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "9x9", "--jobs", "1", "--out", a.string()}).code,
              kExitOk);
    ASSERT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "9x9", "--jobs", "4", "--out", b.string()}).code,
              kExitOk);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_FALSE(slurp(a).empty());
}

TEST(Cli, SweepJsonSummary) {
    const CliRun r = invoke({"sweep", "--config", config_path("cooperative_ratio.toml"), "--grid", "11", "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["points"], 11);
    EXPECT_TRUE(j["optimum"]["coords"].contains("g_ratio"));
}

TEST(Cli, GridMismatchRejected) {
    EXPECT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "4"}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "4x1"}).code, kExitUsage);
    EXPECT_EQ(invoke({"sweep", "--config", config_path("landscape_dissipative.toml"), "--grid", "ax3"}).code, kExitUsage);
}

TEST(Cli, ParseGrid) {
    EXPECT_EQ(parse_grid("101x101"), (std::vector<std::size_t>{101, 101}));
    EXPECT_EQ(parse_grid("7"), (std::vector<std::size_t>{7}));
    EXPECT_THROW(parse_grid("3x"), ConfigError);
}

TEST(Cli, SteadyStateBareDetuning) {
    const CliRun r = invoke({"steady-state", "--config", config_path("bistability_coherent.toml"), "--format", "json"});
    EXPECT_TRUE(r.code == kExitOk || r.code == kExitInfeasible) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j.contains("bistability"));
}

TEST(Cli, SteadyStateOperatingPoint) {
    const CliRun r = invoke({"steady-state", "--config", config_path("survival_coherent.toml"), "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_FALSE(r.out.empty());
}

TEST(Cli, Couplings) {
    const CliRun r = invoke({"couplings", "--config", config_path("interferometer_example.toml"), "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(std::isfinite(j["g_omega_hz"].get<double>()));
    EXPECT_TRUE(std::isfinite(j["g_kappa_hz"].get<double>()));
    EXPECT_FALSE(j["non_physical_phase"].get<bool>());
    EXPECT_EQ(r.err, "");
    EXPECT_EQ(invoke({"couplings", "--config", config_path("landscape_coherent.toml")}).code, kExitUsage);
}

TEST(Cli, JobsFromEnvironment) {
    RunConfig cfg;
    cfg.jobs = 3;
    CliOptions o;
    ::setenv("OPTOMECH_JOBS", "5", 1);
    EXPECT_EQ(resolve_jobs(o, cfg), 5u);
    o.jobs = 2;
    EXPECT_EQ(resolve_jobs(o, cfg), 2u);
    ::unsetenv("OPTOMECH_JOBS");
    o.jobs.reset();
    EXPECT_EQ(resolve_jobs(o, cfg), 3u);
}
