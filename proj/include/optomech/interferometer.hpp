#pragma once

// Single-photon couplings of a Michelson-Sagnac interferometer with a movable
// membrane, treated as one compound mirror.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "optomech/error.hpp"

namespace optomech {

using complex = std::complex<double>;

struct InterferometerParams {
    complex bs_r{1.0, 0.0};   // beam-splitter reflectivity R
    complex bs_t{0.0, 0.0};   // beam-splitter transmissivity T
    complex mem_r{0.0, 0.0};  // membrane reflectivity
    complex mem_t{1.0, 0.0};  // membrane transmissivity
    double x_offset = 0.0;    // optical phase of the static membrane position, rad
    double omega_a = 0.0;     // rad/s
    double length_L = 0.0;    // m
    double x_zpf = 0.0;       // m
    bool lossless = false;    // assert |R|^2+|T|^2 = 1 and |r|^2+|t|^2 = 1
};

struct EffectiveMirror {
    complex rho;
    complex tau;
};

struct SinglePhotonCouplings {
    double g_omega = 0.0;          // rad/s, real part
    double g_kappa = 0.0;          // rad/s, real part
    double g_omega_imag = 0.0;     // discarded imaginary residuals
    double g_kappa_imag = 0.0;
    bool non_physical_phase = false;
};

inline constexpr double kLosslessTolerance = 1e-9;
inline constexpr double kImaginaryResidualTolerance = 1e-6;

inline std::vector<std::string> interferometer_violations(const InterferometerParams& ip) {
    std::vector<std::string> out;
    const double bs = std::norm(ip.bs_r) + std::norm(ip.bs_t);
    const double mem = std::norm(ip.mem_r) + std::norm(ip.mem_t);
    if (bs > 1.0 + kLosslessTolerance) out.emplace_back("beam splitter is not passive: |R|^2+|T|^2 > 1");
    if (mem > 1.0 + kLosslessTolerance) out.emplace_back("membrane is not passive: |r|^2+|t|^2 > 1");
    if (ip.lossless) {
        if (std::abs(bs - 1.0) > kLosslessTolerance) out.emplace_back("lossless beam splitter requires |R|^2+|T|^2 = 1");
        if (std::abs(mem - 1.0) > kLosslessTolerance) out.emplace_back("lossless membrane requires |r|^2+|t|^2 = 1");
    }
    if (!(ip.length_L > 0.0)) out.emplace_back("length_L must be > 0");
    if (!(ip.x_zpf >= 0.0)) out.emplace_back("x_zpf must be >= 0");
    return out;
}

inline EffectiveMirror effective_mirror(const InterferometerParams& ip) {
    if (ip.mem_t == complex{0.0, 0.0})
        throw Error(ErrorCode::DegenerateMembrane, "membrane transmissivity is zero; its phase is undefined");
    const complex R = ip.bs_r;
    const complex T = ip.bs_t;
    const complex e_plus = std::polar(1.0, 2.0 * ip.x_offset);
    const complex e_minus = std::conj(e_plus);
    const complex unphase = std::polar(1.0, -std::arg(ip.mem_t));

    const complex rho = -((R * R * e_plus + T * T * e_minus) * ip.mem_r + 2.0 * R * T * ip.mem_t) * unphase;
    const complex cross = R * std::conj(T) * e_plus;
    const complex tau = ((cross - std::conj(cross)) * ip.mem_r - (std::norm(R) - std::norm(T)) * ip.mem_t) * unphase;
    return {rho, tau};
}

/// g_omega and g_kappa from the interferometer geometry. The formulas produce
/// complex numbers in general; the real parts are returned and the imaginary
/// parts reported, flagged when they exceed 1e-6 of the magnitude.
inline SinglePhotonCouplings single_photon_couplings(const InterferometerParams& ip) {
    const auto violations = interferometer_violations(ip);
    if (!violations.empty()) throw Error(ErrorCode::InvalidParameter, violations.front());

    const EffectiveMirror m = effective_mirror(ip);
    const double scale = ip.omega_a * ip.x_zpf / ip.length_L;
    const double cos_t = std::cos(std::arg(ip.mem_t));
    const complex R = ip.bs_r;
    const complex T = ip.bs_t;

    const complex g_omega = -2.0 * scale * ((std::norm(R) - std::norm(T)) + m.tau * cos_t);
    const complex g_kappa = complex{0.0, -std::sqrt(2.0)} * scale * std::abs(m.tau) * (2.0 * R * T + m.rho * cos_t);

    SinglePhotonCouplings out;
    out.g_omega = g_omega.real();
    out.g_kappa = g_kappa.real();
    out.g_omega_imag = g_omega.imag();
    out.g_kappa_imag = g_kappa.imag();
    auto flagged = [](complex z) { return std::abs(z.imag()) > kImaginaryResidualTolerance * std::abs(z); };
    out.non_physical_phase = flagged(g_omega) || flagged(g_kappa);
    return out;
}

} // namespace optomech
