#pragma once

// Command-line front end. `run` is the whole program minus main(), so tests
// can drive it with argument vectors and captured streams.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optomech/interferometer.hpp"
#include "optomech/io/config.hpp"
#include "optomech/io/output.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/sweep.hpp"

namespace optomech::io {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2 };

struct CliOptions {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string grid;
    std::optional<unsigned> jobs;
    std::optional<double> t_max;
};

/// "101x51" -> {101, 51}; "201" -> {201}.
inline std::vector<std::size_t> parse_grid(const std::string& s) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t x = s.find_first_of("xX", start);
        const std::string part = s.substr(start, x == std::string::npos ? std::string::npos : x - start);
        std::size_t n = 0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), n);
        if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size() || n == 0)
            throw ConfigError({"--grid expects N or NxM with positive integers (got \"" + s + "\")"});
        out.push_back(n);
        if (x == std::string::npos) break;
        start = x + 1;
    }
    return out;
}

inline unsigned resolve_jobs(const CliOptions& o, const RunConfig& cfg) {
    if (o.jobs) return std::max(1u, *o.jobs);
    if (const char* env = std::getenv("OPTOMECH_JOBS")) {
        unsigned n = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), n);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || n == 0)
            throw ConfigError({"OPTOMECH_JOBS must be a positive integer (got \"" + std::string(s) + "\")"});
        return n;
    }
    return cfg.jobs;
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError({"cannot write \"" + path + "\""});
    f << text;
}

inline json state_json(const SteadyState& s) {
    return {{"x_s", s.x_s},
            {"p_s", s.p_s},
            {"n_s", s.n_s},
            {"delta_a_hz", s.delta_a / constants::two_pi},
            {"delta_s_hz", s.delta_s / constants::two_pi},
            {"kappa_s_hz", s.kappa_s / constants::two_pi},
            {"gamma_big_s", s.gamma_big_s},
            {"drive_phase_rad", s.drive_phase}};
}

inline int cmd_steady_state(const RunConfig& cfg, const CliOptions& o, std::ostream& out, std::ostream& err) {
    json j;
    bool any_stable = false;
    if (cfg.mode == SteadyStateMode::BareDetuning) {
        const BranchSet set = steady_states_at_bare_detuning(cfg.params, cfg.detuning);
        j["real_roots"] = set.real_roots;
        j["branches"] = json::array();
        for (std::size_t i = 0; i < set.branches.size(); ++i) {
            json b = state_json(set.branches[i].state);
            b["stable"] = set.branches[i].stable;
            b["zero_connected"] = set.zero_connected == i;
            any_stable = any_stable || set.branches[i].stable;
            j["branches"].push_back(b);
        }
        // A power axis turns the query into a bistability scan.
        for (const Axis& a : cfg.axes) {
            if (a.param != AxisParam::Power) continue;
            const BistabilityReport rep = classify_bistability(cfg.params, cfg.detuning, a.values());
            json bj{{"window_present", rep.window_present}, {"window_contiguous", rep.window_contiguous}};
            bj["window_low_mw"] = rep.window_low ? json(*rep.window_low * 1e3) : json();
            bj["window_high_mw"] = rep.window_high ? json(*rep.window_high * 1e3) : json();
            std::size_t max_adm = 0, min_adm = 3;
            for (const auto& pc : rep.points) {
                max_adm = std::max(max_adm, pc.admissible);
                min_adm = std::min(min_adm, pc.admissible);
            }
            bj["min_admissible_roots"] = min_adm;
            bj["max_admissible_roots"] = max_adm;
            j["bistability"] = bj;
        }
    } else {
        const PointResult r = evaluate_point(cfg.point());
        if (!r.state) {
            err << "infeasible: " << r.note << '\n';
            return kExitInfeasible;
        }
        j["branches"] = json::array({state_json(*r.state)});
        j["branches"][0]["stable"] = r.stable;
        j["E_N"] = r.log_negativity ? json(*r.log_negativity) : json();
        any_stable = r.stable;
    }
    j["mode"] = to_string(cfg.mode);

    if (o.format == "json") {
        emit(o.out, j.dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        os << "mode " << to_string(cfg.mode) << '\n';
        if (j.contains("real_roots")) os << "real roots " << j["real_roots"].get<std::size_t>() << '\n';
        for (const auto& b : j["branches"]) {
            os << "x_s " << format_number(b["x_s"].get<double>()) << "  delta_s_hz "
               << format_number(b["delta_s_hz"].get<double>()) << "  kappa_s_hz "
               << format_number(b["kappa_s_hz"].get<double>()) << "  n_s " << format_number(b["n_s"].get<double>())
               << "  " << (b["stable"].get<bool>() ? "stable" : "unstable");
            if (b.value("zero_connected", false)) os << "  zero-connected";
            os << '\n';
        }
        if (j.contains("E_N") && !j["E_N"].is_null()) os << "E_N " << format_number(j["E_N"].get<double>()) << '\n';
        if (j.contains("bistability")) {
            const auto& bj = j["bistability"];
            os << "bistability " << (bj["window_present"].get<bool>() ? "present" : "absent");
            if (bj["window_present"].get<bool>())
                os << " from " << format_number(bj["window_low_mw"].get<double>()) << " mW to "
                   << format_number(bj["window_high_mw"].get<double>()) << " mW"
                   << (bj["window_contiguous"].get<bool>() ? "" : " (not contiguous)");
            os << '\n';
        }
        emit(o.out, os.str(), out);
    }
    if (!any_stable) {
        err << "no stable steady state\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

inline int cmd_sweep(RunConfig cfg, const CliOptions& o, std::ostream& out, std::ostream& err) {
    if (cfg.axes.empty()) throw ConfigError({"sweep needs a [sweep] section with at least one axis"});
    if (!o.grid.empty()) {
        const auto g = parse_grid(o.grid);
        if (g.size() != cfg.axes.size())
            throw ConfigError({"--grid gives " + std::to_string(g.size()) + " sizes for " +
                               std::to_string(cfg.axes.size()) + " axes"});
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g[k] == 1) throw ConfigError({"--grid sizes must be at least 2"});
            cfg.axes[k].points = g[k];
        }
    }
    SweepSpec spec = cfg.sweep_spec();
    spec.jobs = resolve_jobs(o, cfg);
    const SweepResult r = sweep(spec);
    const json summary = sweep_summary(r);

    if (o.format == "json") {
        emit(o.out, summary.dump(2) + "\n", out);
        if (cfg.output.csv) emit(*cfg.output.csv, to_csv(r), out);
    } else {
        emit(!o.out.empty() ? o.out : cfg.output.csv.value_or(""), to_csv(r), out);
        if (cfg.output.json) emit(*cfg.output.json, summary.dump(2) + "\n", out);
    }

    const SweepStatistics s = sweep_statistics(r);
    err << s.points << " points, " << s.stable << " stable, " << s.entangled << " entangled";
    if (r.optimum) {
        err << "; optimum E_N " << format_number(r.optimum->log_negativity) << " at";
        for (std::size_t k = 0; k < r.axes.size(); ++k)
            err << ' ' << axis_column(r.axes[k].param) << '=' << format_number(axis_to_human(r.axes[k].param, r.optimum->coords[k]));
    }
    err << '\n';
    if (s.stable == 0) {
        err << "no stable points\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

inline int cmd_survival(const RunConfig& cfg, const CliOptions& o, std::ostream& out, std::ostream& err) {
    const double t_max = o.t_max.value_or(cfg.survival_t_max.value_or(100.0));
    SurvivalResult s;
    try {
        s = survival_temperature(cfg.point(), t_max);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEntanglement) throw;
        err << e.what() << '\n';
        return kExitInfeasible;
    }
    if (o.format == "json") {
        emit(o.out, survival_summary(s).dump(2) + "\n", out);
    } else {
        std::ostringstream os;
        os << "T* = " << format_number(s.temperature) << " K";
        if (s.saturated) os << " (saturated: entanglement persists up to t_max)";
        else os << "  [" << format_number(s.lower) << ", " << format_number(s.upper) << "] K";
        os << '\n';
        emit(o.out, os.str(), out);
    }
    return kExitOk;
}

inline int cmd_couplings(const RunConfig& cfg, const CliOptions& o, std::ostream& out, std::ostream& err) {
    if (!cfg.interferometer) throw ConfigError({"couplings needs an [interferometer] section"});
    SinglePhotonCouplings c;
    try {
        c = single_photon_couplings(cfg.interferometer_params());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateMembrane) throw;
        err << e.what() << '\n';
        return kExitInfeasible;
    }
    const json j{{"g_omega_hz", c.g_omega / constants::two_pi},
                 {"g_kappa_hz", c.g_kappa / constants::two_pi},
                 {"g_omega_imag_hz", c.g_omega_imag / constants::two_pi},
                 {"g_kappa_imag_hz", c.g_kappa_imag / constants::two_pi},
                 {"non_physical_phase", c.non_physical_phase}};
    if (o.format == "json") {
        emit(o.out, j.dump(2) + "\n", out);
    } else {
        emit(o.out,
             "g_omega_hz " + format_number(j["g_omega_hz"].get<double>()) + "\ng_kappa_hz " +
                 format_number(j["g_kappa_hz"].get<double>()) + "\n",
             out);
    }
    if (c.non_physical_phase) err << "warning: couplings carry an imaginary residual; real parts reported\n";
    return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Dissipative optomechanics: steady states, stability and stationary entanglement", "optomech"};
    app.require_subcommand(1);
    CliOptions o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file (.toml or .json)")->required();
        sub->add_option("--out", o.out, "output file (default: stdout)");
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    };
    CLI::App* ss = app.add_subcommand("steady-state", "branch set and bistability classification");
    CLI::App* sw = app.add_subcommand("sweep", "grid sweep: CSV grid plus JSON summary");
    CLI::App* sv = app.add_subcommand("survival-temp", "temperature at which entanglement vanishes");
    CLI::App* cp = app.add_subcommand("couplings", "single-photon couplings from interferometer data");
    CLI::App* va = app.add_subcommand("validate", "check a configuration file");
    for (CLI::App* sub : {ss, sw, sv, cp, va}) add_common(sub);
    sw->add_option("--grid", o.grid, "override axis point counts, N or NxM");
    sw->add_option("--jobs", o.jobs, "worker threads (fallback: OPTOMECH_JOBS)");
    sv->add_option("--t-max", o.t_max, "upper temperature bound in K");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (argc <= 1) err << app.help();
        else err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        const RunConfig cfg = load_config(o.config);
        if (va->parsed()) {
            for (const auto& w : validate_params(cfg.params).warnings) err << "warning: " << w << '\n';
            err << "ok\n";
            return kExitOk;
        }
        if (ss->parsed()) return cmd_steady_state(cfg, o, out, err);
        if (sw->parsed()) return cmd_sweep(cfg, o, out, err);
        if (sv->parsed()) return cmd_survival(cfg, o, out, err);
        return cmd_couplings(cfg, o, out, err);
    } catch (const ConfigError& e) {
        err << "config error:\n  " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidParameter ? kExitUsage : kExitInfeasible;
    }
}

} // namespace optomech::io
