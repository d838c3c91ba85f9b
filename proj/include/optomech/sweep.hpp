#pragma once

// Full pipeline per parameter point (operating point -> drift/diffusion ->
// stability -> covariance -> E_N), grid sweeps over one or two axes, argmax
// search and survival-temperature bisection.

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "optomech/core_model.hpp"
#include "optomech/error.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/linear_model.hpp"
#include "optomech/steady_state.hpp"

namespace optomech {

enum class SteadyStateMode {
    BareDetuning,       // detuning is Delta_a, x_s from the cubic
    EffectiveDetuning,  // detuning is Delta_s, kappa_s and Gamma_s solved self-consistently
    OperatingPoint,     // detuning is Delta_s, kappa_s = kappa_a, Gamma_s = sqrt(2 kappa_a)
};

inline const char* to_string(SteadyStateMode m) {
    switch (m) {
    case SteadyStateMode::BareDetuning: return "bare-detuning";
    case SteadyStateMode::EffectiveDetuning: return "effective-detuning";
    case SteadyStateMode::OperatingPoint: return "operating-point";
    }
    return "unknown";
}

enum class AxisParam { DeltaSOverOmegaM, DeltaA, GOmega, GKappa, GRatio, Power, Temperature };

inline const char* to_string(AxisParam a) {
    switch (a) {
    case AxisParam::DeltaSOverOmegaM: return "delta_s_over_omega_m";
    case AxisParam::DeltaA: return "delta_a";
    case AxisParam::GOmega: return "g_omega";
    case AxisParam::GKappa: return "g_kappa";
    case AxisParam::GRatio: return "g_ratio";
    case AxisParam::Power: return "power";
    case AxisParam::Temperature: return "temperature";
    }
    return "unknown";
}

enum class Spacing { Linear, Log };

/// One swept parameter. Values are in library units: rad/s for delta_a and
/// the couplings, W for power, K for temperature, dimensionless otherwise.
struct Axis {
    AxisParam param = AxisParam::DeltaSOverOmegaM;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 2;
    Spacing spacing = Spacing::Linear;

    std::vector<double> values() const {
        std::vector<double> v(points);
        if (points == 1) {
            v[0] = min;
            return v;
        }
        for (std::size_t i = 0; i < points; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(points - 1);
            v[i] = spacing == Spacing::Linear ? min + t * (max - min)
                                              : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
        }
        v.back() = max;
        return v;
    }
};

/// A single evaluation: `detuning` is Delta_a in bare-detuning mode and
/// Delta_s otherwise (rad/s).
struct PointInput {
    PhysicalParams params;
    SteadyStateMode mode = SteadyStateMode::OperatingPoint;
    double detuning = 0.0;
};

struct PointDiagnostics {
    double lyapunov_residual = 0.0;
    double nu_minus = 0.0;
    double nu_plus = 0.0;
    bool physical = false;
    bool routh_hurwitz_stable = false;
    double routh_hurwitz_margin = 0.0;
    bool spectral_stable = false;
    double spectral_margin = 0.0;           // -max Re(eigenvalue), rad/s
    double spectral_relative_margin = 0.0;  // margin / spectral radius
    bool ramp_jumped = false;
};

struct PointResult {
    PointInput input;
    std::optional<SteadyState> state;
    bool feasible = false;
    bool stable = false;
    std::optional<double> log_negativity;  // only when stable
    std::optional<EntanglementReport> entanglement;
    std::optional<LinearizedModel> model;
    PointDiagnostics diagnostics;
    std::string note;
};

inline PointResult evaluate_point(const PointInput& in) {
    PointResult r;
    r.input = in;
    const PhysicalParams& p = in.params;
    require_valid(p);

    try {
        switch (in.mode) {
        case SteadyStateMode::BareDetuning: {
            const RampResult ramp = ramp_bare_detuning(p, in.detuning);
            r.diagnostics.ramp_jumped = ramp.jumped;
            r.state = steady_state_from_displacement(p, in.detuning, ramp.x);
            break;
        }
        case SteadyStateMode::EffectiveDetuning:
            r.state = steady_state_at_effective_detuning(p, in.detuning);
            break;
        case SteadyStateMode::OperatingPoint:
            r.state = steady_state_at_operating_point(p, in.detuning);
            break;
        }
        r.model = build_linearized_model(*r.state, p, thermal_occupation(p.temperature, p.omega_m));
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::InadmissibleBranch:
        case ErrorCode::NoOperatingPoint:
        case ErrorCode::SingularInputCoupling:
            r.state.reset();
            r.model.reset();
            r.note = e.what();
            return r;
        default:
            throw;
        }
    }
    r.feasible = true;

    const Quartic poly = characteristic_polynomial(r.model->A);
    auto& d = r.diagnostics;
    d.routh_hurwitz_margin = routh_hurwitz_margin(poly);
    d.routh_hurwitz_stable = d.routh_hurwitz_margin > kRouthHurwitzTolerance;
    const SpectralStability spec = spectral_stable(r.model->A);
    d.spectral_stable = spec.stable;
    d.spectral_margin = spec.margin;
    d.spectral_relative_margin = spec.relative_margin();

    r.stable = d.routh_hurwitz_stable;
    if (!r.stable) return r;

    try {
        const Mat4 V = solve_lyapunov(r.model->A, r.model->D);
        d.lyapunov_residual = lyapunov_residual(r.model->A, V, r.model->D);
        const PhysicalityReport phys = physicality_check(V);
        d.nu_minus = phys.nu_minus;
        d.nu_plus = phys.nu_plus;
        d.physical = phys.physical;
        EntanglementReport e = logarithmic_negativity(V);
        e.stable = true;
        r.log_negativity = e.log_negativity;
        r.entanglement = e;
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::StabilityPrecondition:
        case ErrorCode::Conditioning:
            // Marginal: the two stability tests straddle the boundary.
            r.stable = false;
            r.note = e.what();
            break;
        case ErrorCode::UnphysicalCovariance:
            r.note = e.what();
            break;
        default:
            throw;
        }
    }
    return r;
}

struct SweepSpec {
    CouplingKind scenario = CouplingKind::Coherent;
    std::vector<Axis> axes;
    PointInput base;
    unsigned jobs = 1;
};

struct Optimum {
    std::vector<std::size_t> index;
    std::vector<double> coords;
    double log_negativity = 0.0;
};

struct SweepResult {
    std::vector<Axis> axes;
    std::vector<std::vector<double>> axis_values;
    std::vector<std::vector<double>> coords;  // per point, one value per axis
    std::vector<PointResult> points;          // row-major, first axis slowest
    std::optional<Optimum> optimum;
};

inline bool is_coupling_axis(AxisParam a) {
    return a == AxisParam::GOmega || a == AxisParam::GKappa || a == AxisParam::GRatio;
}
inline bool is_detuning_axis(AxisParam a) { return a == AxisParam::DeltaSOverOmegaM || a == AxisParam::DeltaA; }

/// Writes one axis value into a point's inputs.
inline void apply_axis(PointInput& in, AxisParam a, double v) {
    switch (a) {
    case AxisParam::DeltaSOverOmegaM: in.detuning = v * in.params.omega_m; break;
    case AxisParam::DeltaA: in.detuning = v; break;
    case AxisParam::GOmega: in.params.g_omega = v; break;
    case AxisParam::GKappa: in.params.g_kappa = v; break;
    case AxisParam::GRatio: in.params.g_kappa = v * in.params.g_omega; break;
    case AxisParam::Power: in.params.power = v; break;
    case AxisParam::Temperature: in.params.temperature = v; break;
    }
}

inline std::vector<std::string> sweep_spec_violations(const SweepSpec& s) {
    std::vector<std::string> out;
    if (s.axes.empty() || s.axes.size() > 2) out.emplace_back("a sweep has one or two axes");
    for (const Axis& a : s.axes) {
        const std::string name = to_string(a.param);
        if (!std::isfinite(a.min) || !std::isfinite(a.max)) out.push_back(name + ": range must be finite");
        if (a.points == 0) out.push_back(name + ": point count must be positive");
        if (a.points == 1 && a.min != a.max) out.push_back(name + ": a single-point axis needs min == max");
        if (a.points >= 2 && !(a.min < a.max)) out.push_back(name + ": range must be ordered (min < max)");
        if (a.spacing == Spacing::Log && !(a.min > 0.0)) out.push_back(name + ": log spacing needs min > 0");
        if (a.param == AxisParam::DeltaSOverOmegaM && s.base.mode == SteadyStateMode::BareDetuning)
            out.push_back(name + ": effective-detuning axis needs an effective-detuning or operating-point mode");
        if (a.param == AxisParam::DeltaA && s.base.mode != SteadyStateMode::BareDetuning)
            out.push_back(name + ": bare-detuning axis needs bare-detuning mode");
    }
    if (s.axes.size() == 2 && s.axes[0].param == s.axes[1].param) out.emplace_back("axes must differ");

    // Scenario consistency, with swept couplings at their largest value.
    PointInput probe = s.base;
    for (const Axis& a : s.axes)
        if (is_coupling_axis(a.param)) apply_axis(probe, a.param, a.max);
    for (auto& v : scenario_violations(s.scenario, probe.params.g_omega, probe.params.g_kappa)) out.push_back(v);
    for (auto& v : validate_params(s.base.params).errors) out.push_back(v);
    return out;
}

/// Argmax of E_N over points that carry one. Ties go to the lower coupling
/// coordinate, then the lower detuning coordinate, then the remaining axes.
inline std::optional<Optimum> find_optimum(const SweepResult& r) {
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < r.axes.size(); ++k)
        if (is_coupling_axis(r.axes[k].param)) order.push_back(k);
    for (std::size_t k = 0; k < r.axes.size(); ++k)
        if (is_detuning_axis(r.axes[k].param)) order.push_back(k);
    for (std::size_t k = 0; k < r.axes.size(); ++k)
        if (!is_coupling_axis(r.axes[k].param) && !is_detuning_axis(r.axes[k].param)) order.push_back(k);

    std::optional<std::size_t> best;
    auto better = [&](std::size_t i, std::size_t j) {
        const double ei = *r.points[i].log_negativity, ej = *r.points[j].log_negativity;
        if (ei != ej) return ei > ej;
        for (std::size_t k : order)
            if (r.coords[i][k] != r.coords[j][k]) return r.coords[i][k] < r.coords[j][k];
        return i < j;
    };
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        if (!r.points[i].log_negativity) continue;
        if (!best || better(i, *best)) best = i;
    }
    if (!best) return std::nullopt;

    Optimum o;
    o.coords = r.coords[*best];
    o.log_negativity = *r.points[*best].log_negativity;
    std::size_t rem = *best;
    o.index.assign(r.axes.size(), 0);
    for (std::size_t k = r.axes.size(); k-- > 0;) {
        o.index[k] = rem % r.axes[k].points;
        rem /= r.axes[k].points;
    }
    return o;
}

/// Evaluates every grid point. Each point lands in a pre-assigned slot, so the
/// result does not depend on `jobs` or scheduling.
inline SweepResult sweep(const SweepSpec& spec) {
    const auto violations = sweep_spec_violations(spec);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
        throw Error(ErrorCode::InvalidParameter, msg);
    }

    SweepResult r;
    r.axes = spec.axes;
    std::size_t total = 1;
    for (const Axis& a : spec.axes) {
        r.axis_values.push_back(a.values());
        total *= a.points;
    }

    std::vector<PointInput> inputs(total, spec.base);
    r.coords.assign(total, std::vector<double>(spec.axes.size()));
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        for (std::size_t k = spec.axes.size(); k-- > 0;) {
            const std::size_t idx = rem % spec.axes[k].points;
            rem /= spec.axes[k].points;
            r.coords[i][k] = r.axis_values[k][idx];
        }
        // Couplings first so a ratio axis sees the final g_omega.
        for (std::size_t k = 0; k < spec.axes.size(); ++k)
            if (spec.axes[k].param != AxisParam::GRatio) apply_axis(inputs[i], spec.axes[k].param, r.coords[i][k]);
        for (std::size_t k = 0; k < spec.axes.size(); ++k)
            if (spec.axes[k].param == AxisParam::GRatio) apply_axis(inputs[i], spec.axes[k].param, r.coords[i][k]);
    }

    r.points.resize(total);
    const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(total)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) r.points[i] = evaluate_point(inputs[i]);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back([&, j] {
                try {
                    worker();
                } catch (...) {
                    errors[j] = std::current_exception();
                    next = total;
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    r.optimum = find_optimum(r);
    return r;
}

struct SurvivalResult {
    double temperature = 0.0;  // K
    bool saturated = false;    // E_N > 0 all the way to t_max
    double lower = 0.0;        // last temperature with E_N > 0
    double upper = 0.0;        // first temperature above it with E_N = 0
    std::size_t evaluations = 0;
};

inline constexpr double kSurvivalReferenceTemperature = 0.01;  // K
inline constexpr double kSurvivalRelativeWidth = 0.01;
inline constexpr std::size_t kSurvivalScanPoints = 200;

inline double entanglement_at_temperature(PointInput in, double temperature) {
    in.params.temperature = temperature;
    const PointResult r = evaluate_point(in);
    return r.log_negativity.value_or(0.0);
}

/// Temperature above which E_N stays zero up to t_max: a log-spaced scan from
/// 10 mK locates the last positive sample, then bisection shrinks the bracket
/// to 1% relative width.
inline SurvivalResult survival_temperature(const PointInput& in, double t_max) {
    if (!(t_max > kSurvivalReferenceTemperature))
        throw Error(ErrorCode::InvalidParameter, "t_max must exceed the 10 mK reference temperature");

    SurvivalResult out;
    auto en = [&](double t) {
        ++out.evaluations;
        return entanglement_at_temperature(in, t);
    };
    if (!(en(kSurvivalReferenceTemperature) > 0.0))
        throw Error(ErrorCode::NoEntanglement, "no entanglement at the 10 mK reference temperature");

    const Axis scan{AxisParam::Temperature, kSurvivalReferenceTemperature, t_max, kSurvivalScanPoints, Spacing::Log};
    const std::vector<double> temps = scan.values();
    std::size_t last_positive = 0;
    for (std::size_t i = 1; i < temps.size(); ++i)
        if (en(temps[i]) > 0.0) last_positive = i;

    if (last_positive + 1 == temps.size()) {
        out.saturated = true;
        out.temperature = out.lower = out.upper = t_max;
        return out;
    }
    double lo = temps[last_positive], hi = temps[last_positive + 1];
    while (hi - lo > kSurvivalRelativeWidth * hi) {
        const double mid = 0.5 * (lo + hi);
        (en(mid) > 0.0 ? lo : hi) = mid;
    }
    out.lower = lo;
    out.upper = hi;
    out.temperature = 0.5 * (lo + hi);
    return out;
}

} // namespace optomech
