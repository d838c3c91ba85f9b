#include <cmath>

#include <gtest/gtest.h>

#include "optomech/core_model.hpp"
#include "support/generators.hpp"

using namespace optomech;

namespace {

// Independent long-double evaluations with the CODATA constants spelled out.
long double oracle_amplitude(long double power, long double omega_d) {
    return std::sqrt(power / (1.054571817e-34L * omega_d));
}

long double oracle_occupation(long double t, long double omega_m) {
    return 1.0L / (std::exp(1.054571817e-34L * omega_m / (1.380649e-23L * t)) - 1.0L);
}

} // namespace

TEST(DriveAmplitude, ZeroPowerGivesZero) { EXPECT_EQ(drive_amplitude(0.0, 1e15), 0.0); }

TEST(DriveAmplitude, ReferenceDrive) {
    const double omega_d = constants::two_pi * 281.96e12;
    const double e = drive_amplitude(0.05, omega_d);
    EXPECT_NEAR(e, 5.17e8, 0.005e8);
    EXPECT_NEAR(e, static_cast<double>(oracle_amplitude(0.05L, omega_d)), 1e-12 * e);
}

TEST(DriveAmplitude, QuadruplePowerDoublesAmplitude) {
    const double w = 1.7e15;
    EXPECT_NEAR(drive_amplitude(0.4, w), 2.0 * drive_amplitude(0.1, w), 1e-15 * drive_amplitude(0.4, w));
}

TEST(DriveAmplitude, RejectsNonpositiveFrequency) {
    EXPECT_THROW(drive_amplitude(1.0, 0.0), Error);
    EXPECT_THROW(drive_amplitude(1.0, -1.0), Error);
}

TEST(DriveAmplitude, PropertySquaresToPhotonFlux) {
    testgen::Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double p = rng.log_uniform(1e-9, 10.0);
        const double w = rng.log_uniform(1e9, 1e17);
        const double e = drive_amplitude(p, w);
        EXPECT_NEAR(e * e * constants::hbar * w, p, 1e-15 * p);
    }
}

TEST(ThermalOccupation, ZeroAtZeroTemperature) { EXPECT_EQ(thermal_occupation(0.0, 1e6), 0.0); }

TEST(ThermalOccupation, ReferenceBath) {
    const double wm = constants::two_pi * 136e3;
    const double n = thermal_occupation(0.4, wm);
    EXPECT_NEAR(n, 6.13e4, 0.005e4);
    EXPECT_NEAR(n, static_cast<double>(oracle_occupation(0.4L, wm)), 1e-9 * n);
    EXPECT_NEAR(thermal_occupation(4.0, wm) / n, 10.0, 1e-3);
}

TEST(ThermalOccupation, NoOverflowAtTinyTemperature) {
    EXPECT_EQ(thermal_occupation(1e-12, constants::two_pi * 136e3), 0.0);
}

TEST(ThermalOccupation, PropertyMonotone) {
    testgen::Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const double w = rng.log_uniform(1e3, 1e9);
        const double t1 = rng.log_uniform(1e-3, 1e3);
        const double t2 = t1 * rng.uniform(1.001, 3.0);
        EXPECT_LT(thermal_occupation(t1, w), thermal_occupation(t2, w));
        EXPECT_GT(thermal_occupation(t1, w), thermal_occupation(t1, w * rng.uniform(1.001, 3.0)));
    }
}

TEST(ThermalOccupation, PropertyHighTemperatureLimit) {
    testgen::Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double w = rng.log_uniform(1e3, 1e7);
        const double x = rng.log_uniform(1e-6, 1e-2);  // hbar w / kT
        const double t = constants::hbar * w / (constants::k_boltzmann * x);
        const double n = thermal_occupation(t, w);
        EXPECT_LT(std::abs(n - (1.0 / x - 0.5)) / n, 1e-3);
    }
}

TEST(ZeroPointFluctuation, ReferenceMembrane) {
    const double wm = constants::two_pi * 136e3;
    const double x = zero_point_fluctuation(80e-12, wm);
    EXPECT_NEAR(x, 8.8e-16, 0.05e-16);
    EXPECT_NEAR(x, static_cast<double>(std::sqrt(1.054571817e-34L / (2.0L * 80e-12L * wm))), 1e-12 * x);
    EXPECT_NEAR(zero_point_fluctuation(320e-12, wm), 0.5 * x, 1e-15 * x);
    EXPECT_NEAR(zero_point_fluctuation(80e-12, 4.0 * wm), 0.5 * x, 1e-15 * x);
}

TEST(ValidateParams, ReferenceSetIsClean) {
    const auto r = validate_params(reference_params());
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.warnings.empty());
    const PhysicalParams p = reference_params();
    EXPECT_NEAR(p.quality_factor(), 5.9e5, 0.05e5);
}

TEST(ValidateParams, AggregatesEveryViolation) {
    PhysicalParams p = reference_params();
    p.kappa_a = 0.0;
    p.mass = -1.0;
    p.temperature = -2.0;
    const auto r = validate_params(p);
    EXPECT_EQ(r.errors.size(), 3u);
    EXPECT_THROW(require_valid(p), Error);
}

TEST(ValidateParams, LowQualityFactorWarns) {
    PhysicalParams p = reference_params();
    p.gamma_m = p.omega_m;
    const auto r = validate_params(p);
    EXPECT_TRUE(r.ok());
    ASSERT_EQ(r.warnings.size(), 1u);
}

TEST(Scenario, ConsistencyRules) {
    EXPECT_TRUE(scenario_violations(CouplingKind::Coherent, 1.0, 0.0).empty());
    EXPECT_FALSE(scenario_violations(CouplingKind::Coherent, 1.0, 1.0).empty());
    EXPECT_TRUE(scenario_violations(CouplingKind::Dissipative, 0.0, 1.0).empty());
    EXPECT_FALSE(scenario_violations(CouplingKind::Dissipative, 1.0, 1.0).empty());
    EXPECT_TRUE(scenario_violations(CouplingKind::Cooperative, 1.0, 1.0).empty());
    EXPECT_EQ(scenario_violations(CouplingKind::Cooperative, 0.0, 0.0).size(), 2u);
}

TEST(Derive, AllNonnegative) {
    const DerivedQuantities d = derive(reference_params());
    EXPECT_GT(d.drive_amplitude, 0.0);
    EXPECT_GT(d.n_th, 0.0);
    EXPECT_GT(d.x_zpf, 0.0);
}
