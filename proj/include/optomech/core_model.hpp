#pragma once

// Physical parameters of the membrane-in-interferometer device and the scalar
// quantities derived from them. All frequencies and rates are angular (rad/s);
// conversion from ordinary frequencies happens at the config boundary.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "optomech/constants.hpp"
#include "optomech/error.hpp"

namespace optomech {

struct PhysicalParams {
    double omega_d = 0.0;      // drive, rad/s
    double omega_a = 0.0;      // cavity resonance at membrane equilibrium, rad/s
    double kappa_a = 0.0;      // cavity amplitude decay rate, rad/s
    double omega_m = 0.0;      // mechanical resonance, rad/s
    double gamma_m = 0.0;      // mechanical damping, rad/s
    double mass = 0.0;         // kg
    double length_L = 0.0;     // m
    double g_omega = 0.0;      // single-photon coherent coupling, rad/s
    double g_kappa = 0.0;      // single-photon dissipative coupling, rad/s
    double power = 0.0;        // W
    double temperature = 0.0;  // K
    // Drive phase. Empty means "choose the phase that makes the intracavity
    // amplitude real", which is the gauge the linearized model is written in.
    std::optional<double> theta;

    double quality_factor() const { return gamma_m > 0.0 ? omega_m / gamma_m : INFINITY; }
};

struct DerivedQuantities {
    double drive_amplitude = 0.0; // sqrt(photons / s)
    double n_th = 0.0;
    double x_zpf = 0.0;           // m
};

enum class CouplingKind { Coherent, Dissipative, Cooperative };

inline const char* to_string(CouplingKind kind) {
    switch (kind) {
    case CouplingKind::Coherent: return "coherent";
    case CouplingKind::Dissipative: return "dissipative";
    case CouplingKind::Cooperative: return "cooperative";
    }
    return "unknown";
}

/// Returns a description of every way (g_omega, g_kappa) contradicts `kind`;
/// empty when consistent.
inline std::vector<std::string> scenario_violations(CouplingKind kind, double g_omega, double g_kappa) {
    std::vector<std::string> out;
    switch (kind) {
    case CouplingKind::Coherent:
        if (g_kappa != 0.0) out.emplace_back("coherent scenario requires g_kappa = 0");
        break;
    case CouplingKind::Dissipative:
        if (g_omega != 0.0) out.emplace_back("dissipative scenario requires g_omega = 0");
        break;
    case CouplingKind::Cooperative:
        if (g_omega == 0.0) out.emplace_back("cooperative scenario requires g_omega != 0");
        if (g_kappa == 0.0) out.emplace_back("cooperative scenario requires g_kappa != 0");
        break;
    }
    return out;
}

/// Drive amplitude |E| = sqrt(P / (hbar omega_d)).
inline double drive_amplitude(double power, double omega_d) {
    if (!(omega_d > 0.0)) throw Error(ErrorCode::InvalidParameter, "omega_d must be positive");
    if (!(power >= 0.0)) throw Error(ErrorCode::InvalidParameter, "power must be nonnegative");
    return std::sqrt(power / (constants::hbar * omega_d));
}

/// Bose-Einstein occupation of the mechanical bath; exactly 0 at T = 0.
inline double thermal_occupation(double temperature, double omega_m) {
    if (!(temperature >= 0.0)) throw Error(ErrorCode::InvalidParameter, "temperature must be nonnegative");
    if (!(omega_m > 0.0)) throw Error(ErrorCode::InvalidParameter, "omega_m must be positive");
    if (temperature == 0.0) return 0.0;
    const double ratio = constants::hbar * omega_m / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(ratio);
}

inline double zero_point_fluctuation(double mass, double omega_m) {
    if (!(mass > 0.0)) throw Error(ErrorCode::InvalidParameter, "mass must be positive");
    if (!(omega_m > 0.0)) throw Error(ErrorCode::InvalidParameter, "omega_m must be positive");
    return std::sqrt(constants::hbar / (2.0 * mass * omega_m));
}

inline DerivedQuantities derive(const PhysicalParams& p) {
    return {drive_amplitude(p.power, p.omega_d), thermal_occupation(p.temperature, p.omega_m),
            zero_point_fluctuation(p.mass, p.omega_m)};
}

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

// Below this omega_m / gamma_m the Markovian thermal-noise model is questionable.
inline constexpr double kHighQThreshold = 1.0e3;

/// Collects every invariant violation instead of stopping at the first.
inline ValidationReport validate_params(const PhysicalParams& p) {
    ValidationReport r;
    auto require = [&](bool ok, const char* msg) {
        if (!ok) r.errors.emplace_back(msg);
    };
    const double values[] = {p.omega_d, p.omega_a, p.kappa_a, p.omega_m, p.gamma_m, p.mass,
                             p.length_L, p.g_omega, p.g_kappa, p.power, p.temperature};
    for (double v : values) {
        if (!std::isfinite(v)) {
            r.errors.emplace_back("all parameters must be finite");
            break;
        }
    }
    require(p.omega_d > 0.0, "omega_d must be > 0");
    require(p.kappa_a > 0.0, "kappa_a must be > 0");
    require(p.omega_m > 0.0, "omega_m must be > 0");
    require(p.gamma_m >= 0.0, "gamma_m must be >= 0");
    require(p.mass > 0.0, "mass must be > 0");
    require(p.power >= 0.0, "power must be >= 0");
    require(p.temperature >= 0.0, "temperature must be >= 0");
    if (p.theta && !std::isfinite(*p.theta)) r.errors.emplace_back("theta must be finite");

    if (p.omega_m > 0.0 && p.gamma_m > 0.0 && p.omega_m / p.gamma_m < kHighQThreshold) {
        r.warnings.emplace_back("omega_m / gamma_m = " + std::to_string(p.omega_m / p.gamma_m) +
                                " violates the high-Q assumption of the Markovian Brownian-noise model");
    }
    return r;
}

inline void require_valid(const PhysicalParams& p) {
    auto report = validate_params(p);
    if (report.ok()) return;
    std::string msg;
    for (const auto& e : report.errors) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorCode::InvalidParameter, msg);
}

/// Device parameters of the membrane-in-the-middle Michelson-Sagnac setup:
/// lambda = 1064 nm (omega_d / 2pi = 281.96 THz), omega_m / 2pi = 136 kHz,
/// gamma_m / 2pi = 0.23 Hz, L = 8.7 cm, m = 80 ng, kappa_a / 2pi = 1.5 MHz,
/// drive 50 mW, bath 0.4 K. Couplings are zero; the cavity is resonant
/// (omega_a = omega_d) and callers supply the detuning explicitly.
inline PhysicalParams reference_params() {
    using constants::two_pi;
    PhysicalParams p;
    p.omega_d = two_pi * 281.96e12;
    p.omega_a = p.omega_d;
    p.kappa_a = two_pi * 1.5e6;
    p.omega_m = two_pi * 136e3;
    p.gamma_m = two_pi * 0.23;
    p.mass = 80e-12;
    p.length_L = 8.7e-2;
    p.power = 50e-3;
    p.temperature = 0.4;
    return p;
}

} // namespace optomech
