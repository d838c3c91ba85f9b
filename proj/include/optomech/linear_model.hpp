#pragma once

// Linearized fluctuation dynamics around an operating point: drift and
// diffusion matrices in the quadrature basis (dx, dp, dx_a, dp_a), and two
// independent stability tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "optomech/core_model.hpp"
#include "optomech/error.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/state.hpp"

namespace optomech {

using Mat4 = Eigen::Matrix4d;

struct LinearizedModel {
    Mat4 A = Mat4::Zero();
    Mat4 D = Mat4::Zero();
    double G_omega = 0.0;
    double G_kappa = 0.0;
};

inline constexpr double kPhaseTolerance = 1e-12;
inline constexpr double kRouthHurwitzTolerance = 1e-12;

/// Enhanced coupling G = sqrt(2) g a_s; a_s must already be real.
inline double linearized_couplings(double g, std::complex<double> a_s) {
    if (std::abs(a_s.imag()) > kPhaseTolerance * std::abs(a_s))
        throw Error(ErrorCode::PhaseNotFixed, "cavity amplitude is not real; apply the real-amplitude drive phase first");
    return std::sqrt(2.0) * g * a_s.real();
}

/// Drive phase theta with tan(theta) = delta / kappa.
inline double phase_for_real_amplitude(double delta, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidParameter, "kappa must be positive");
    return std::atan2(delta, kappa);
}

/// The intracavity amplitude re-expressed in the gauge where it is real and
/// positive. With Gamma_s > 0 that gauge is theta = atan2(Delta_s, kappa_s).
inline std::complex<double> real_gauge_amplitude(const SteadyState& ss) {
    const double theta = phase_for_real_amplitude(ss.delta_s, ss.kappa_s);
    const std::complex<double> a = ss.a_s * std::polar(1.0, theta - ss.drive_phase);
    // Only rounding separates `a` from the positive real axis here.
    return {std::abs(a), 0.0};
}

namespace detail {

inline void require_admissible(const SteadyState& ss) {
    if (!(ss.kappa_s > 0.0)) throw Error(ErrorCode::InadmissibleBranch, "effective decay kappa_s must be positive");
    if (ss.gamma_big_s == 0.0)
        throw Error(ErrorCode::SingularInputCoupling, "input coupling Gamma_s vanishes (x_s = 2 kappa_a / g_kappa)");
}

} // namespace detail

inline Mat4 drift_matrix(const SteadyState& ss, const PhysicalParams& p) {
    detail::require_admissible(ss);
    const auto a = real_gauge_amplitude(ss);
    const double Gw = linearized_couplings(p.g_omega, a);
    const double Gk = linearized_couplings(p.g_kappa, a);
    const double q = std::sqrt(2.0 * p.kappa_a) * ss.gamma_big_s;

    Mat4 A = Mat4::Zero();
    A(0, 1) = p.omega_m;
    A(1, 0) = -p.omega_m;
    A(1, 1) = -p.gamma_m;
    A(1, 2) = Gw + Gk * ss.delta_s / q;
    A(1, 3) = -Gk * ss.kappa_s / q;
    A(2, 0) = Gk - 2.0 * Gk * ss.kappa_s / q;
    A(2, 2) = -ss.kappa_s;
    A(2, 3) = ss.delta_s;
    A(3, 0) = Gw - 2.0 * Gk * ss.delta_s / q;
    A(3, 2) = -ss.delta_s;
    A(3, 3) = -ss.kappa_s;
    return A;
}

inline Mat4 diffusion_matrix(const SteadyState& ss, const PhysicalParams& p, double n_th) {
    detail::require_admissible(ss);
    const double Gk = linearized_couplings(p.g_kappa, real_gauge_amplitude(ss));
    const double root = std::sqrt(2.0 * p.kappa_a);

    Mat4 D = Mat4::Zero();
    D(1, 1) = p.gamma_m * (2.0 * n_th + 1.0) + Gk * Gk / (4.0 * p.kappa_a);
    D(2, 2) = ss.gamma_big_s * ss.gamma_big_s / 2.0;
    D(3, 3) = D(2, 2);
    D(1, 3) = Gk / root * ss.gamma_big_s / 2.0;
    D(3, 1) = D(1, 3);
    return D;
}

inline LinearizedModel build_linearized_model(const SteadyState& ss, const PhysicalParams& p, double n_th) {
    LinearizedModel m;
    m.A = drift_matrix(ss, p);
    m.D = diffusion_matrix(ss, p, n_th);
    const auto a = real_gauge_amplitude(ss);
    m.G_omega = linearized_couplings(p.g_omega, a);
    m.G_kappa = linearized_couplings(p.g_kappa, a);
    return m;
}

/// det(sI - A) from sums of principal minors, which avoids the cancellation
/// that power traces suffer when the entries span many orders of magnitude.
inline Quartic characteristic_polynomial(const Mat4& A) {
    auto det2 = [&](int i, int j) { return A(i, i) * A(j, j) - A(i, j) * A(j, i); };
    auto det3 = [&](int i, int j, int k) {
        return A(i, i) * (A(j, j) * A(k, k) - A(j, k) * A(k, j)) - A(i, j) * (A(j, i) * A(k, k) - A(j, k) * A(k, i)) +
               A(i, k) * (A(j, i) * A(k, j) - A(j, j) * A(k, i));
    };
    double m2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m2 += det2(i, j);
    const double m3 = det3(0, 1, 2) + det3(0, 1, 3) + det3(0, 2, 3) + det3(1, 2, 3);

    Quartic q;
    q.c[3] = -A.trace();
    q.c[2] = m2;
    q.c[1] = -m3;
    q.c[0] = A.determinant();
    return q;
}

/// Smallest normalized Routh-Hurwitz expression for s^4 + a3 s^3 + a2 s^2 + a1 s + a0.
/// Positive means every condition holds; a nonpositive coefficient yields -1.
inline double routh_hurwitz_margin(const Quartic& q) {
    const double a3 = q.c[3], a2 = q.c[2], a1 = q.c[1], a0 = q.c[0];
    if (!(a3 > 0.0 && a2 > 0.0 && a1 > 0.0 && a0 > 0.0)) return -1.0;
    const double h2 = a3 * a2 - a1;
    const double h2_scale = std::max(a3 * a2, a1);
    const double h3 = a1 * h2 - a3 * a3 * a0;
    const double h3_scale = std::max({a1 * a3 * a2, a1 * a1, a3 * a3 * a0});
    return std::min(h2 / h2_scale, h3 / h3_scale);
}

/// Points within the relative tolerance of the boundary count as unstable.
inline bool routh_hurwitz_stable(const Quartic& q) { return routh_hurwitz_margin(q) > kRouthHurwitzTolerance; }

struct SpectralStability {
    bool stable = false;
    double margin = 0.0;            // -max Re(s)
    double spectral_radius = 0.0;
    std::array<std::complex<double>, 4> eigenvalues{};

    double relative_margin() const { return spectral_radius > 0.0 ? margin / spectral_radius : margin; }
};

inline SpectralStability spectral_stable(const Mat4& A) {
    SpectralStability out;
    out.eigenvalues = quartic_roots(characteristic_polynomial(A));
    double max_re = -INFINITY;
    for (const auto& s : out.eigenvalues) {
        max_re = std::max(max_re, s.real());
        out.spectral_radius = std::max(out.spectral_radius, std::abs(s));
    }
    out.margin = -max_re;
    out.stable = max_re < 0.0;
    return out;
}

} // namespace optomech
