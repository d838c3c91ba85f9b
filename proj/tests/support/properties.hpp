#pragma once

// Randomized steady-state checks shared by the unit tests and the acceptance
// run. Each draw returns what was compared so callers can report it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>

#include "optomech/steady_state.hpp"
#include "support/generators.hpp"

namespace testgen {

struct ClosedFormDraw {
    double closed_form = 0.0;
    double cubic = 0.0;
    double relative_error = 0.0;
};

/// Purely dissipative draw: pick n_s inside the admissible domain, rebuild the
/// drive flux that produces it, then solve the general cubic at that drive.
inline ClosedFormDraw closed_form_vs_cubic(Rng& rng) {
    using optomech::constants::two_pi;
    optomech::PhysicalParams p = optomech::reference_params();
    p.kappa_a = two_pi * rng.log_uniform(0.3e6, 5e6);
    p.omega_m = two_pi * rng.log_uniform(30e3, 1e6);
    p.g_omega = 0.0;
    p.g_kappa = two_pi * rng.log_uniform(0.1, 100.0) * (rng.coin() ? 1.0 : -1.0);
    const double delta_a = p.kappa_a * rng.uniform(-5.0, 5.0);

    double n_s = 0.0;
    const double ratio = p.g_kappa / p.kappa_a;
    if (delta_a > 0.0) {
        const double bound = p.omega_m / (2.0 * ratio * ratio * delta_a);
        n_s = bound * rng.uniform(0.0, 0.95);
    } else {
        n_s = rng.log_uniform(1e3, 1e11);
    }

    ClosedFormDraw out;
    out.closed_form = optomech::dissipative_closed_form(p, delta_a, n_s);
    const double kappa_s = p.kappa_a - p.g_kappa * out.closed_form;
    const double root = std::sqrt(2.0 * p.kappa_a);
    const double gamma_big_s = root - p.g_kappa * out.closed_form / root;
    const double e2 = n_s * (kappa_s * kappa_s + delta_a * delta_a) / (gamma_big_s * gamma_big_s);
    p.power = power_for_flux(p, e2);

    const auto roots = optomech::real_roots_cubic(optomech::cubic_coefficients(p, delta_a));
    double best = std::numeric_limits<double>::infinity();
    for (double x : roots)
        if (std::abs(x - out.closed_form) < std::abs(best - out.closed_form)) best = x;
    out.cubic = best;
    out.relative_error = std::abs(best - out.closed_form) / std::max(std::abs(out.closed_form), 1e-300);
    if (out.closed_form == 0.0) out.relative_error = std::abs(best);
    return out;
}

/// Right-hand side of the mean-field equations, written out independently
/// for the Jacobian oracle. State (x, p, Re a, Im a).
inline Eigen::Vector4d mean_field_rhs(const optomech::PhysicalParams& p, double delta_a, std::complex<double> drive,
                                      const Eigen::Vector4d& s) {
    const std::complex<double> a{s[2], s[3]};
    const double root = std::sqrt(2.0 * p.kappa_a);
    const double kappa_s = p.kappa_a - p.g_kappa * s[0];
    const double delta_s = delta_a - p.g_omega * s[0];
    const double gamma_big_s = root - p.g_kappa * s[0] / root;
    // i (E* a - E a*) = -2 Im(E* a)
    const double cross = -2.0 * (std::conj(drive) * a).imag();
    const std::complex<double> da = -std::complex<double>(kappa_s, delta_s) * a + gamma_big_s * drive;
    return {p.omega_m * s[1],
            p.g_omega * std::norm(a) - p.omega_m * s[0] + p.g_kappa * cross / root - p.gamma_m * s[1],
            da.real(), da.imag()};
}

inline double mean_field_decay_rate(const optomech::PhysicalParams& p, double delta_a, const optomech::SteadyState& s,
                                    std::complex<double> drive) {
    const Eigen::Vector4d x0{s.x_s, 0.0, s.a_s.real(), s.a_s.imag()};
    Eigen::Matrix4d J;
    for (int k = 0; k < 4; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x0[k]));
        Eigen::Vector4d up = x0, dn = x0;
        up[k] += h;
        dn[k] -= h;
        J.col(k) = (mean_field_rhs(p, delta_a, drive, up) - mean_field_rhs(p, delta_a, drive, dn)) / (2.0 * h);
    }
    Eigen::EigenSolver<Eigen::Matrix4d> es(J, false);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) worst = std::max(worst, es.eigenvalues()[i].real());
    return -worst;
}

struct DynamicsDraw {
    double x_final = 0.0;
    double x_branch = 0.0;
    double error = 0.0;
    double tolerance = 0.0;
};

/// Monostable draw in dimensionless units, integrated from the origin until
/// the slowest linear mode has decayed by e^-40. Draws that are multistable,
/// unstable or too weakly damped are rejected and redrawn.
inline DynamicsDraw mean_dynamics_from_origin(Rng& rng) {
    for (;;) {
        optomech::PhysicalParams p = dimensionless_params();
        p.kappa_a = rng.uniform(0.5, 2.0);
        p.gamma_m = rng.uniform(0.2, 1.0);
        p.g_omega = rng.uniform(-0.02, 0.02);
        p.g_kappa = rng.coin() ? rng.uniform(-0.02, 0.02) : 0.0;
        p.power = power_for_flux(p, rng.uniform(0.0, 3000.0));
        const double delta_a = rng.uniform(-2.0, 2.0);

        const optomech::BranchSet set = optomech::steady_states_at_bare_detuning(p, delta_a);
        if (set.real_roots != 1 || set.branches.size() != 1 || !set.zero_connected) continue;
        const optomech::SteadyState& s = set.branches[0].state;
        const double theta = std::atan2(delta_a, p.kappa_a);
        optomech::PhysicalParams q = p;
        q.theta = theta;
        const optomech::SteadyState sq = optomech::steady_state_from_displacement(q, delta_a, s.x_s);
        const auto drive = std::polar(optomech::drive_amplitude(p.power, p.omega_d), theta);
        const double rate = mean_field_decay_rate(p, delta_a, sq, drive);
        if (!(rate > 0.02)) continue;

        const double dt = 0.05 / std::max({p.kappa_a, p.omega_m, std::abs(delta_a)});
        const double t_end = 40.0 / rate;
        const auto traj = optomech::integrate_mean_dynamics(p, delta_a, {}, t_end, dt, 1u << 30);
        DynamicsDraw out;
        out.x_final = traj.final_state.x;
        out.x_branch = s.x_s;
        out.error = std::abs(out.x_final - out.x_branch);
        out.tolerance = 1e-6 * std::max(1.0, std::abs(out.x_branch));
        return out;
    }
}

} // namespace testgen
