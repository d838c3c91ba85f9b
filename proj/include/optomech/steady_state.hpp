#pragma once

// Classical operating points of the driven membrane: the cubic for the
// displacement, closed forms for the pure-coupling limits, branch bookkeeping
// for bistability and a fixed-step integrator of the mean-field equations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "optomech/core_model.hpp"
#include "optomech/error.hpp"
#include "optomech/linear_model.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/state.hpp"

namespace optomech {

/// Coefficients of the displacement cubic at bare detuning delta_a.
inline CubicCoefficients cubic_coefficients(const PhysicalParams& p, double delta_a) {
    const double e2 = std::pow(drive_amplitude(p.power, p.omega_d), 2);
    const double gw = p.g_omega, gk = p.g_kappa, wm = p.omega_m, ka = p.kappa_a;
    CubicCoefficients c;
    c.a = 2.0 * (gw * gw + gk * gk) * wm * ka;
    c.b = -4.0 * wm * ka * (gw * delta_a + gk * ka) - 3.0 * gw * gk * gk * e2;
    c.c = 2.0 * wm * ka * (ka * ka + delta_a * delta_a) + 2.0 * gk * e2 * (gk * delta_a + 4.0 * gw * ka);
    c.d = -4.0 * ka * e2 * (gw * ka + gk * delta_a);
    return c;
}

/// Same self-consistency as `cubic_coefficients`, written for the unknown x_s
/// with the effective detuning Delta_s = delta_a - g_omega x_s held fixed:
///   2 kappa_a omega_m x (kappa_s^2 + Delta_s^2)
///     = g_omega u^2 |E|^2 + 2 g_kappa Delta_s u |E|^2,   u = 2 kappa_a - g_kappa x.
inline CubicCoefficients effective_detuning_cubic(const PhysicalParams& p, double delta_s) {
    const double e2 = std::pow(drive_amplitude(p.power, p.omega_d), 2);
    const double gw = p.g_omega, gk = p.g_kappa, wm = p.omega_m, ka = p.kappa_a;
    CubicCoefficients c;
    c.a = 2.0 * ka * wm * gk * gk;
    c.b = -4.0 * ka * ka * wm * gk - gw * gk * gk * e2;
    c.c = 2.0 * ka * wm * (ka * ka + delta_s * delta_s) + 4.0 * ka * gw * gk * e2 + 2.0 * gk * gk * delta_s * e2;
    c.d = -4.0 * ka * ka * gw * e2 - 4.0 * ka * gk * delta_s * e2;
    return c;
}

namespace detail {

inline double drive_phase_for(const PhysicalParams& p, double delta_s, double kappa_s) {
    return p.theta ? *p.theta : std::atan2(delta_s, kappa_s);
}

inline SteadyState make_state(const PhysicalParams& p, double x_s, double delta_a, double delta_s, double kappa_s,
                              double gamma_big_s) {
    SteadyState s;
    s.x_s = x_s;
    s.p_s = 0.0;
    s.delta_a = delta_a;
    s.delta_s = delta_s;
    s.kappa_s = kappa_s;
    s.gamma_big_s = gamma_big_s;
    s.drive_phase = drive_phase_for(p, delta_s, kappa_s);
    const std::complex<double> drive = std::polar(drive_amplitude(p.power, p.omega_d), s.drive_phase);
    s.a_s = gamma_big_s * drive / std::complex<double>(kappa_s, delta_s);
    s.n_s = std::norm(s.a_s);
    return s;
}

} // namespace detail

/// Populates the full operating point from a displacement that solves the cubic.
inline SteadyState steady_state_from_displacement(const PhysicalParams& p, double delta_a, double x_s) {
    const double kappa_s = p.kappa_a - p.g_kappa * x_s;
    if (!(kappa_s > 0.0)) throw Error(ErrorCode::InadmissibleBranch, "kappa_s = kappa_a - g_kappa x_s must be positive");
    const double root = std::sqrt(2.0 * p.kappa_a);
    return detail::make_state(p, x_s, delta_a, delta_a - p.g_omega * x_s, kappa_s, root - p.g_kappa * x_s / root);
}

/// Right-hand side of the stationary displacement condition evaluated at the
/// state's own amplitude: [g_omega n_s + i g_kappa (a_s E* - a_s* E) / sqrt(2 kappa_a)] / omega_m.
inline double displacement_from_amplitude(const PhysicalParams& p, const SteadyState& s) {
    const std::complex<double> drive = std::polar(drive_amplitude(p.power, p.omega_d), s.drive_phase);
    const std::complex<double> cross = s.a_s * std::conj(drive) - std::conj(s.a_s) * drive;
    const std::complex<double> i{0.0, 1.0};
    const double dissipative = (i * p.g_kappa * cross / std::sqrt(2.0 * p.kappa_a)).real();
    return (p.g_omega * s.n_s + dissipative) / p.omega_m;
}

/// |x_rhs - x_s| relative to the larger of the two (or 1 near zero).
inline double fixed_point_residual(const PhysicalParams& p, const SteadyState& s) {
    const double rhs = displacement_from_amplitude(p, s);
    return std::abs(rhs - s.x_s) / std::max({std::abs(rhs), std::abs(s.x_s), 1.0});
}

struct RampResult {
    double x = 0.0;
    bool jumped = false; // the followed branch ended in a fold and the ramp jumped
};

inline constexpr int kRampSteps = 256;

/// Follows the root of C0 + lambda * C1 that starts at x = 0 for lambda = 0 up
/// to lambda = 1, i.e. an adiabatic ramp of the drive power. When the branch
/// annihilates with a neighbour the ramp continues on the surviving root.
inline RampResult follow_zero_connected_root(const CubicCoefficients& c0, const CubicCoefficients& c1) {
    auto at = [&](double lambda) {
        return CubicCoefficients{c0.a + lambda * c1.a, c0.b + lambda * c1.b, c0.c + lambda * c1.c,
                                 c0.d + lambda * c1.d};
    };
    RampResult out;
    std::vector<double> prev = real_roots_cubic(at(0.0));
    double x = 0.0;
    for (int k = 1; k <= kRampSteps; ++k) {
        const double lambda = static_cast<double>(k) / kRampSteps;
        std::vector<double> roots = real_roots_cubic(at(lambda));
        if (roots.empty()) throw Error(ErrorCode::NoOperatingPoint, "displacement equation lost all real roots");

        if (prev.size() == 3 && roots.size() == 1) {
            // The pair with the smaller gap annihilated; was it ours?
            const double gap_lo = prev[1] - prev[0];
            const double gap_hi = prev[2] - prev[1];
            const bool lower_pair = gap_lo < gap_hi;
            const double a = lower_pair ? prev[0] : prev[1];
            const double b = lower_pair ? prev[1] : prev[2];
            if (x == a || x == b) out.jumped = true;
        }
        x = *std::min_element(roots.begin(), roots.end(),
                              [&](double l, double r) { return std::abs(l - x) < std::abs(r - x); });
        prev = std::move(roots);
    }
    out.x = x;
    return out;
}

inline RampResult ramp_bare_detuning(const PhysicalParams& p, double delta_a) {
    PhysicalParams dark = p;
    dark.power = 0.0;
    const CubicCoefficients c0 = cubic_coefficients(dark, delta_a);
    const CubicCoefficients full = cubic_coefficients(p, delta_a);
    return follow_zero_connected_root(c0, {full.a - c0.a, full.b - c0.b, full.c - c0.c, full.d - c0.d});
}

inline RampResult ramp_effective_detuning(const PhysicalParams& p, double delta_s) {
    PhysicalParams dark = p;
    dark.power = 0.0;
    const CubicCoefficients c0 = effective_detuning_cubic(dark, delta_s);
    const CubicCoefficients full = effective_detuning_cubic(p, delta_s);
    return follow_zero_connected_root(c0, {full.a - c0.a, full.b - c0.b, full.c - c0.c, full.d - c0.d});
}

/// Operating point at fixed effective detuning, solved self-consistently for
/// x_s (and hence kappa_s, Gamma_s) on the branch connected to x_s = 0 at zero drive.
inline SteadyState steady_state_at_effective_detuning(const PhysicalParams& p, double delta_s) {
    require_valid(p);
    double x = 0.0;
    if (p.g_kappa == 0.0) {
        // Linear in x: kappa_s and Gamma_s do not depend on it.
        const double e2 = std::pow(drive_amplitude(p.power, p.omega_d), 2);
        const double n_s = 2.0 * p.kappa_a * e2 / (p.kappa_a * p.kappa_a + delta_s * delta_s);
        x = p.g_omega * n_s / p.omega_m;
    } else {
        x = ramp_effective_detuning(p, delta_s).x;
    }
    const double kappa_s = p.kappa_a - p.g_kappa * x;
    if (!(kappa_s > 0.0))
        throw Error(ErrorCode::NoOperatingPoint, "no admissible displacement at this effective detuning");
    const double root = std::sqrt(2.0 * p.kappa_a);
    return detail::make_state(p, x, delta_s + p.g_omega * x, delta_s, kappa_s, root - p.g_kappa * x / root);
}

/// Operating point where the effective detuning, linewidth and input coupling
/// are the device values at the displaced membrane position: Delta_s given,
/// kappa_s = kappa_a, Gamma_s = sqrt(2 kappa_a). x_s follows from the
/// stationary force balance and is reported, not fed back.
inline SteadyState steady_state_at_operating_point(const PhysicalParams& p, double delta_s) {
    require_valid(p);
    const double e2 = std::pow(drive_amplitude(p.power, p.omega_d), 2);
    const double n_s = 2.0 * p.kappa_a * e2 / (p.kappa_a * p.kappa_a + delta_s * delta_s);
    const double x = (p.g_omega + p.g_kappa * delta_s / p.kappa_a) * n_s / p.omega_m;
    return detail::make_state(p, x, delta_s + p.g_omega * x, delta_s, p.kappa_a, std::sqrt(2.0 * p.kappa_a));
}

/// Small root of g_kappa omega_m x^2 - 2 kappa_a omega_m x + 2 g_kappa Delta_a n_s = 0
/// for purely dissipative coupling. Written without the 1 - sqrt(1 - q)
/// cancellation.
inline double dissipative_closed_form(const PhysicalParams& p, double delta_a, double n_s) {
    if (p.g_omega != 0.0) throw Error(ErrorCode::InvalidParameter, "closed form requires g_omega = 0");
    if (!(n_s >= 0.0)) throw Error(ErrorCode::InvalidParameter, "n_s must be nonnegative");
    const double ratio = p.g_kappa / p.kappa_a;
    const double q = 2.0 * ratio * ratio * (delta_a / p.omega_m) * n_s;
    if (q > 1.0)
        throw Error(ErrorCode::Admissibility, "n_s exceeds (kappa_a/g_kappa)^2 omega_m / (2 Delta_a)");
    return 2.0 * ratio * (delta_a / p.omega_m) * n_s / (1.0 + std::sqrt(1.0 - q));
}

struct Branch {
    SteadyState state;
    bool stable = false;
};

struct BranchSet {
    std::vector<Branch> branches;           // ascending x_s
    std::size_t real_roots = 0;             // before the admissibility filter
    std::optional<std::size_t> zero_connected;
};

inline bool is_dynamically_stable(const SteadyState& s, const PhysicalParams& p) {
    return routh_hurwitz_stable(characteristic_polynomial(drift_matrix(s, p)));
}

inline BranchSet steady_states_at_bare_detuning(const PhysicalParams& p, double delta_a) {
    require_valid(p);
    BranchSet out;
    const std::vector<double> roots = real_roots_cubic(cubic_coefficients(p, delta_a));
    out.real_roots = roots.size();
    for (double x : roots) {
        try {
            SteadyState s = steady_state_from_displacement(p, delta_a, x);
            out.branches.push_back({s, is_dynamically_stable(s, p)});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InadmissibleBranch && e.code() != ErrorCode::SingularInputCoupling) throw;
        }
    }
    if (!out.branches.empty()) {
        const double x0 = ramp_bare_detuning(p, delta_a).x;
        std::size_t best = 0;
        for (std::size_t i = 1; i < out.branches.size(); ++i)
            if (std::abs(out.branches[i].state.x_s - x0) < std::abs(out.branches[best].state.x_s - x0)) best = i;
        if (std::abs(out.branches[best].state.x_s - x0) <= 1e-9 * std::max(1.0, std::abs(x0)))
            out.zero_connected = best;
    }
    return out;
}

struct PowerClassification {
    double power = 0.0;
    std::size_t real_roots = 0;
    std::size_t admissible = 0;
    std::size_t stable = 0;
    std::vector<double> x_roots;  // admissible, ascending
};

struct BistabilityReport {
    std::vector<PowerClassification> points;
    bool window_present = false;     // some power has three admissible roots
    bool window_contiguous = false;  // the three-root powers form one run
    std::optional<double> window_low;
    std::optional<double> window_high;
};

inline BistabilityReport classify_bistability(const PhysicalParams& p, double delta_a,
                                              const std::vector<double>& power_grid) {
    if (power_grid.empty()) throw Error(ErrorCode::InvalidParameter, "power grid is empty");
    if (!std::is_sorted(power_grid.begin(), power_grid.end()))
        throw Error(ErrorCode::InvalidParameter, "power grid must be ascending");

    BistabilityReport r;
    std::optional<std::size_t> first, last;
    std::size_t three = 0;
    for (std::size_t i = 0; i < power_grid.size(); ++i) {
        PhysicalParams q = p;
        q.power = power_grid[i];
        const BranchSet set = steady_states_at_bare_detuning(q, delta_a);
        PowerClassification c;
        c.power = q.power;
        c.real_roots = set.real_roots;
        c.admissible = set.branches.size();
        for (const auto& b : set.branches) {
            c.stable += b.stable ? 1 : 0;
            c.x_roots.push_back(b.state.x_s);
        }
        if (c.admissible == 3) {
            if (!first) first = i;
            last = i;
            ++three;
        }
        r.points.push_back(std::move(c));
    }
    if (first) {
        r.window_present = true;
        r.window_contiguous = (*last - *first + 1) == three;
        r.window_low = power_grid[*first];
        r.window_high = power_grid[*last];
    }
    return r;
}

struct MeanState {
    double x = 0.0;
    double p = 0.0;
    std::complex<double> a{};
};

struct MeanTrajectory {
    std::vector<double> t;
    std::vector<MeanState> samples;
    MeanState final_state;
    bool diverged = false;
};

inline constexpr double kAmplitudeOverflowGuard = 1e150;

/// Fixed-step RK4 integration of the mean-field equations at bare detuning
/// delta_a. The drive phase is params.theta, or atan2(delta_a, kappa_a) when
/// unset. Every `sample_every` steps a sample is recorded.
inline MeanTrajectory integrate_mean_dynamics(const PhysicalParams& p, double delta_a, const MeanState& initial,
                                              double t_end, double dt, std::size_t sample_every = 1) {
    require_valid(p);
    const double fastest = std::max({p.kappa_a, p.omega_m, std::abs(delta_a)});
    if (!(dt > 0.0) || dt > 0.05 / fastest)
        throw Error(ErrorCode::InvalidParameter, "dt must satisfy 0 < dt <= 0.05 / max(kappa_a, omega_m, |delta_a|)");
    if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidParameter, "t_end must be nonnegative");
    if (sample_every == 0) sample_every = 1;

    const double theta = p.theta ? *p.theta : std::atan2(delta_a, p.kappa_a);
    const std::complex<double> drive = std::polar(drive_amplitude(p.power, p.omega_d), theta);
    const double root = std::sqrt(2.0 * p.kappa_a);
    const std::complex<double> i{0.0, 1.0};

    auto rhs = [&](const MeanState& s) {
        const double kappa_s = p.kappa_a - p.g_kappa * s.x;
        const double delta_s = delta_a - p.g_omega * s.x;
        const double gamma_big_s = root - p.g_kappa * s.x / root;
        const std::complex<double> cross = std::conj(drive) * s.a - drive * std::conj(s.a);
        MeanState d;
        d.x = p.omega_m * s.p;
        d.p = p.g_omega * std::norm(s.a) - p.omega_m * s.x + (i * p.g_kappa * cross / root).real() - p.gamma_m * s.p;
        d.a = -std::complex<double>(kappa_s, delta_s) * s.a + gamma_big_s * drive;
        return d;
    };
    auto axpy = [](const MeanState& s, double h, const MeanState& d) {
        return MeanState{s.x + h * d.x, s.p + h * d.p, s.a + h * d.a};
    };

    MeanTrajectory traj;
    MeanState s = initial;
    traj.t.push_back(0.0);
    traj.samples.push_back(s);
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    for (std::size_t k = 1; k <= steps; ++k) {
        const MeanState k1 = rhs(s);
        const MeanState k2 = rhs(axpy(s, dt / 2, k1));
        const MeanState k3 = rhs(axpy(s, dt / 2, k2));
        const MeanState k4 = rhs(axpy(s, dt, k3));
        s.x += dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        s.p += dt / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
        s.a += dt / 6 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
        const bool blown = !std::isfinite(s.x) || !std::isfinite(s.p) || !std::isfinite(s.a.real()) ||
                           !std::isfinite(s.a.imag()) || std::abs(s.a) > kAmplitudeOverflowGuard;
        if (blown) {
            traj.diverged = true;
            traj.t.push_back(k * dt);
            traj.samples.push_back(s);
            break;
        }
        if (k % sample_every == 0 || k == steps) {
            traj.t.push_back(k * dt);
            traj.samples.push_back(s);
        }
    }
    traj.final_state = s;
    return traj;
}

} // namespace optomech
