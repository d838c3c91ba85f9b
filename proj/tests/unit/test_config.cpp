#include <string>

#include <gtest/gtest.h>

#include "optomech/io/config.hpp"
#include "support/paths.hpp"

using namespace optomech;
using namespace optomech::io;
using constants::two_pi;

namespace {

const char* kMinimal = R"(
[device]
wavelength_nm = 1064
kappa_a_hz = 1.5e6
omega_m_hz = 136e3
gamma_m_hz = 0.23
mass_ng = 80
length_cm = 8.7

[drive]
power_mw = 50

[bath]
temperature_k = 0.4

[coupling]
scenario = "coherent"
g_omega_hz = 3.1

[detuning]
mode = "operating-point"
delta_s_over_omega_m = 2
)";

std::vector<std::string> problems_of(const std::string& text, ConfigFormat f = ConfigFormat::Toml) {
    try {
        parse_config(text, f);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    if (pos != std::string::npos) s.replace(pos, from.size(), to);
    return s;
}

} // namespace

TEST(Config, BundledCoherentLandscape) {
    const RunConfig c = load_config(config_path("landscape_coherent.toml"));
    EXPECT_EQ(c.scenario, CouplingKind::Coherent);
    EXPECT_DOUBLE_EQ(c.params.power, 0.05);
    EXPECT_DOUBLE_EQ(c.params.temperature, 0.4);
    EXPECT_DOUBLE_EQ(c.params.kappa_a, two_pi * 1.5e6);
    EXPECT_DOUBLE_EQ(c.params.mass, 80e-12);
    EXPECT_DOUBLE_EQ(c.params.length_L, 0.087);
    ASSERT_EQ(c.axes.size(), 2u);
    EXPECT_EQ(c.axes[0].param, AxisParam::DeltaSOverOmegaM);
    EXPECT_EQ(c.axes[1].points, 101u);
    EXPECT_DOUBLE_EQ(c.axes[1].max, two_pi * 5.0);
    EXPECT_EQ(c.mode, SteadyStateMode::OperatingPoint);
}

TEST(Config, EveryBundledConfigLoads) {
    for (const char* name : {"bistability_coherent.toml", "bistability_dissipative.toml", "landscape_coherent.toml", "survival_coherent.toml",
                             "landscape_dissipative.toml", "survival_dissipative.toml", "cooperative_ratio.toml", "survival_cooperative_ratio0.01.toml",
                             "survival_cooperative_ratio0.1.toml", "interferometer_example.toml"}) {
        EXPECT_NO_THROW(load_config(config_path(name))) << name;
    }
}

TEST(Config, WavelengthConvertsToDriveFrequency) {
    const RunConfig c = parse_config(kMinimal, ConfigFormat::Toml);
    EXPECT_NEAR(c.params.omega_d / two_pi, 281.76e12, 0.01e12);
    EXPECT_NEAR(c.detuning, 2.0 * c.params.omega_m, 1e-9);
    EXPECT_FALSE(c.params.theta);
}

TEST(Config, JsonEquivalent) {
    const std::string json = R"({
      "device": {"drive_frequency_hz": 281.96e12, "kappa_a_hz": 1.5e6, "omega_m_hz": 136e3,
                 "gamma_m_hz": 0.23, "mass_ng": 80, "length_cm": 8.7},
      "drive": {"power_mw": 50}, "bath": {"temperature_k": 0.4},
      "coupling": {"scenario": "dissipative", "g_kappa_hz": 19},
      "detuning": {"mode": "operating-point", "delta_s_over_omega_m": 0.1},
      "survival": {"t_max_k": 50}
    })";
    const RunConfig c = parse_config(json, ConfigFormat::Json);
    EXPECT_EQ(c.scenario, CouplingKind::Dissipative);
    EXPECT_DOUBLE_EQ(c.params.g_kappa, two_pi * 19.0);
    EXPECT_EQ(*c.survival_t_max, 50.0);
}

TEST(Config, EmptyFileListsRequiredKeys) {
    const auto p = problems_of("");
    for (const char* section : {"[device]", "[drive]", "[bath]", "[coupling]", "[detuning]"})
        EXPECT_TRUE(mentions(p, section)) << section;
}

TEST(Config, NegativeKappaIsSemanticError) {
    const auto p = problems_of(replace(kMinimal, "kappa_a_hz = 1.5e6", "kappa_a_hz = -1.5e6"));
    EXPECT_TRUE(mentions(p, "kappa_a"));
}

TEST(Config, AllViolationsReportedTogether) {
    std::string t = replace(kMinimal, "kappa_a_hz = 1.5e6", "kappa_a_hz = -1.5e6");
    t = replace(t, "mass_ng = 80", "mass_ng = -80");
    t = replace(t, "temperature_k = 0.4", "temperature_k = -1");
    EXPECT_EQ(problems_of(t).size(), 3u);
}

TEST(Config, UnknownKeysRejected) {
    auto p = problems_of(replace(kMinimal, "power_mw = 50", "power_mw = 50\npowr = 3"));
    EXPECT_TRUE(mentions(p, "unknown key drive.powr"));
    p = problems_of(std::string(kMinimal) + "\n[extras]\nx = 1\n");
    EXPECT_TRUE(mentions(p, "unknown key extras"));
}

TEST(Config, ScenarioMismatch) {
    const auto p = problems_of(replace(kMinimal, "g_omega_hz = 3.1", "g_omega_hz = 3.1\ng_kappa_hz = 1"));
    EXPECT_TRUE(mentions(p, "coherent scenario requires g_kappa = 0"));
}

TEST(Config, DetuningNeedsExactlyOne) {
    auto p = problems_of(replace(kMinimal, "delta_s_over_omega_m = 2", "delta_s_over_omega_m = 2\ndelta_s_hz = 5"));
    EXPECT_TRUE(mentions(p, "exactly one"));
    p = problems_of(replace(kMinimal, "delta_s_over_omega_m = 2", "delta_a_hz = 5"));
    EXPECT_TRUE(mentions(p, "effective modes"));
}

TEST(Config, TomlSyntaxErrorHasLineAndColumn) {
    try {
        parse_config("[device]\nkappa_a_hz = = 3\n", ConfigFormat::Toml);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
    }
}

TEST(Config, JsonSyntaxErrorHasLineAndColumn) {
    try {
        parse_config("{\n  \"device\": {\n    \"kappa_a_hz\": ,\n  }\n}", ConfigFormat::Json);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, TypeErrors) {
    auto p = problems_of(replace(kMinimal, "power_mw = 50", "power_mw = \"fifty\""));
    EXPECT_TRUE(mentions(p, "drive.power_mw must be a number"));
    p = problems_of(replace(kMinimal, "scenario = \"coherent\"", "scenario = \"both\""));
    EXPECT_TRUE(mentions(p, "coupling.scenario"));
}

TEST(Config, SweepAxesInHumanUnits) {
    const std::string t = std::string(kMinimal) +
                          "\n[sweep]\naxes = [{ name = \"g_omega\", min = 0, max = 5, points = 11 },"
                          " { name = \"power\", min = 1, max = 100, points = 3, spacing = \"log\" }]\njobs = 2\n";
    const RunConfig c = parse_config(t, ConfigFormat::Toml);
    ASSERT_EQ(c.axes.size(), 2u);
    EXPECT_DOUBLE_EQ(c.axes[0].max, two_pi * 5.0);
    EXPECT_DOUBLE_EQ(c.axes[1].min, 1e-3);
    EXPECT_EQ(c.axes[1].spacing, Spacing::Log);
    EXPECT_EQ(c.jobs, 2u);
}

TEST(Config, BadSweepAxes) {
    auto p = problems_of(std::string(kMinimal) + "\n[sweep]\naxes = [{ name = \"mass\", min = 0, max = 1, points = 3 }]\n");
    EXPECT_TRUE(mentions(p, "not a sweepable parameter"));
    p = problems_of(std::string(kMinimal) + "\n[sweep]\naxes = [{ name = \"g_omega\", min = 5, max = 1, points = 3 }]\n");
    EXPECT_TRUE(mentions(p, "ordered"));
    p = problems_of(std::string(kMinimal) + "\n[sweep]\naxes = []\n");
    EXPECT_TRUE(mentions(p, "sweep.axes"));
}

TEST(Config, ExplicitThetaKept) {
    const RunConfig c = parse_config(replace(kMinimal, "power_mw = 50", "power_mw = 50\ntheta_rad = 0.25"), ConfigFormat::Toml);
    ASSERT_TRUE(c.params.theta);
    EXPECT_EQ(*c.params.theta, 0.25);
}

TEST(Config, FormatFromExtension) {
    EXPECT_EQ(format_for_path("a/b.toml"), ConfigFormat::Toml);
    EXPECT_EQ(format_for_path("x.json"), ConfigFormat::Json);
    EXPECT_THROW(format_for_path("x.yaml"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/file.toml"), ConfigError);
}

TEST(Config, InterferometerSection) {
    const RunConfig c = load_config(config_path("interferometer_example.toml"));
    ASSERT_TRUE(c.interferometer);
    EXPECT_TRUE(c.interferometer->lossless);
    EXPECT_DOUBLE_EQ(c.interferometer->mem_r.imag(), 0.4);
    const auto p = problems_of(std::string(kMinimal) + "\n[interferometer]\nbs_reflectivity = [1, 0]\nbs_transmissivity = [1, 0]\n");
    EXPECT_TRUE(mentions(p, "not passive"));
}
