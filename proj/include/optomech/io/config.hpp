#pragma once

// Run configuration in human units (Hz, nm, mW, K, ng, cm), read from TOML or
// JSON. Both syntaxes are normalized to one JSON tree and checked by a single
// schema walk that reports every problem at once.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "optomech/constants.hpp"
#include "optomech/core_model.hpp"
#include "optomech/error.hpp"
#include "optomech/interferometer.hpp"
#include "optomech/sweep.hpp"

namespace optomech::io {

using json = nlohmann::json;

enum class ConfigFormat { Toml, Json };

struct InterferometerConfig {
    complex bs_r{1.0, 0.0};
    complex bs_t{0.0, 0.0};
    complex mem_r{0.0, 0.0};
    complex mem_t{1.0, 0.0};
    double x_offset = 0.0;
    bool lossless = false;
};

struct OutputConfig {
    std::optional<std::string> csv;
    std::optional<std::string> json;
};

struct RunConfig {
    PhysicalParams params;
    CouplingKind scenario = CouplingKind::Coherent;
    SteadyStateMode mode = SteadyStateMode::OperatingPoint;
    double detuning = 0.0;  // rad/s: Delta_a in bare-detuning mode, Delta_s otherwise
    std::vector<Axis> axes;
    std::optional<double> survival_t_max;  // K
    std::optional<InterferometerConfig> interferometer;
    OutputConfig output;
    unsigned jobs = 1;

    PointInput point() const { return {params, mode, detuning}; }
    SweepSpec sweep_spec() const { return {scenario, axes, point(), jobs}; }
    InterferometerParams interferometer_params() const;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(ErrorCode::Config, join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& p : v) s += (s.empty() ? "" : "\n  ") + p;
        return s;
    }
    std::vector<std::string> problems_;
};

inline InterferometerParams RunConfig::interferometer_params() const {
    InterferometerParams ip;
    if (interferometer) {
        ip.bs_r = interferometer->bs_r;
        ip.bs_t = interferometer->bs_t;
        ip.mem_r = interferometer->mem_r;
        ip.mem_t = interferometer->mem_t;
        ip.x_offset = interferometer->x_offset;
        ip.lossless = interferometer->lossless;
    }
    ip.omega_a = params.omega_a;
    ip.length_L = params.length_L;
    ip.x_zpf = zero_point_fluctuation(params.mass, params.omega_m);
    return ip;
}

namespace detail {

inline json toml_to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json j = json::object();
        for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
        return j;
    }
    if (const auto* a = node.as_array()) {
        json j = json::array();
        for (const auto& v : *a) j.push_back(toml_to_json(v));
        return j;
    }
    if (const auto* s = node.as_string()) return s->get();
    if (const auto* i = node.as_integer()) return i->get();
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* b = node.as_boolean()) return b->get();
    return json();  // dates and times are not part of the schema
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Schema walker: typed getters that record problems instead of throwing.
class Reader {
public:
    explicit Reader(const json& root) : root_(root) {}

    std::vector<std::string> problems;

    const json* section(const char* name, bool required) {
        if (!root_.is_object()) {
            if (problems.empty()) problems.emplace_back("configuration must be a table/object");
            return nullptr;
        }
        auto it = root_.find(name);
        if (it == root_.end()) {
            if (required) problems.push_back(std::string("missing required section [") + name + "]");
            return nullptr;
        }
        if (!it->is_object()) {
            problems.push_back(std::string("[") + name + "] must be a table");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json* sec, const char* sec_name, const char* key, bool required) {
        if (!sec) return std::nullopt;
        auto it = sec->find(key);
        if (it == sec->end()) {
            if (required) problems.push_back(std::string("missing required key ") + sec_name + "." + key);
            return std::nullopt;
        }
        if (!it->is_number()) {
            problems.push_back(std::string(sec_name) + "." + key + " must be a number");
            return std::nullopt;
        }
        const double v = it->get<double>();
        if (!std::isfinite(v)) {
            problems.push_back(std::string(sec_name) + "." + key + " must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> string(const json* sec, const char* sec_name, const char* key, bool required) {
        if (!sec) return std::nullopt;
        auto it = sec->find(key);
        if (it == sec->end()) {
            if (required) problems.push_back(std::string("missing required key ") + sec_name + "." + key);
            return std::nullopt;
        }
        if (!it->is_string()) {
            problems.push_back(std::string(sec_name) + "." + key + " must be a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::optional<bool> boolean(const json* sec, const char* sec_name, const char* key) {
        if (!sec) return std::nullopt;
        auto it = sec->find(key);
        if (it == sec->end()) return std::nullopt;
        if (!it->is_boolean()) {
            problems.push_back(std::string(sec_name) + "." + key + " must be a boolean");
            return std::nullopt;
        }
        return it->get<bool>();
    }

    std::optional<complex> complex_pair(const json* sec, const char* sec_name, const char* key) {
        if (!sec) return std::nullopt;
        auto it = sec->find(key);
        if (it == sec->end()) return std::nullopt;
        if (it->is_number()) return complex{it->get<double>(), 0.0};
        if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number())
            return complex{(*it)[0].get<double>(), (*it)[1].get<double>()};
        problems.push_back(std::string(sec_name) + "." + key + " must be a number or a [re, im] pair");
        return std::nullopt;
    }

    void reject_unknown(const json* obj, const std::string& where, std::initializer_list<const char*> allowed) {
        if (!obj || !obj->is_object()) return;
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : obj->items())
            if (!ok.count(k)) problems.push_back("unknown key " + where + (where.empty() ? "" : ".") + k);
    }

private:
    const json& root_;
};

inline std::optional<AxisParam> axis_from_name(const std::string& s) {
    static const std::map<std::string, AxisParam> names{
        {"delta_s_over_omega_m", AxisParam::DeltaSOverOmegaM}, {"delta_a", AxisParam::DeltaA},
        {"g_omega", AxisParam::GOmega},  {"g_kappa", AxisParam::GKappa},
        {"g_ratio", AxisParam::GRatio},  {"power", AxisParam::Power},
        {"temperature", AxisParam::Temperature}};
    auto it = names.find(s);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

} // namespace detail

/// Rounds to 15 significant digits, dropping unit-conversion noise such as
/// 30 Hz coming back as 29.999999999999996.
inline double round_significant15(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

/// Human-unit value of an axis coordinate (Hz, mW, K, or dimensionless).
inline double axis_to_human(AxisParam a, double v) {
    switch (a) {
    case AxisParam::DeltaA:
    case AxisParam::GOmega:
    case AxisParam::GKappa: return round_significant15(v / constants::two_pi);
    case AxisParam::Power: return round_significant15(v * 1e3);
    default: return v;
    }
}

inline double axis_from_human(AxisParam a, double v) {
    switch (a) {
    case AxisParam::DeltaA:
    case AxisParam::GOmega:
    case AxisParam::GKappa: return v * constants::two_pi;
    case AxisParam::Power: return v * 1e-3;
    default: return v;
    }
}

/// Column name carrying the unit, e.g. "g_kappa_hz".
inline std::string axis_column(AxisParam a) {
    switch (a) {
    case AxisParam::DeltaA: return "delta_a_hz";
    case AxisParam::GOmega: return "g_omega_hz";
    case AxisParam::GKappa: return "g_kappa_hz";
    case AxisParam::Power: return "power_mw";
    case AxisParam::Temperature: return "temperature_k";
    default: return to_string(a);
    }
}

inline json parse_tree(std::string_view text, ConfigFormat format) {
    if (format == ConfigFormat::Toml) {
        try {
            const toml::table tbl = toml::parse(text);
            return detail::toml_to_json(tbl);
        } catch (const toml::parse_error& e) {
            const auto& pos = e.source().begin;
            throw ConfigError({"syntax error at line " + std::to_string(pos.line) + ", column " +
                               std::to_string(pos.column) + ": " + std::string(e.description())});
        }
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError({"syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                           ": " + e.what()});
    }
}

/// Parses and fully validates a configuration. Throws ConfigError listing
/// every syntax or semantic problem.
inline RunConfig parse_config(std::string_view text, ConfigFormat format) {
    using constants::two_pi;
    const json root = parse_tree(text, format);
    detail::Reader rd(root);
    RunConfig cfg;

    rd.reject_unknown(&root, "", {"device", "drive", "bath", "coupling", "detuning", "sweep", "survival",
                                  "interferometer", "output"});

    const json* dev = rd.section("device", true);
    rd.reject_unknown(dev, "device", {"drive_frequency_hz", "wavelength_nm", "cavity_frequency_hz", "kappa_a_hz",
                                      "omega_m_hz", "gamma_m_hz", "mass_ng", "length_cm"});
    const auto f_d = rd.number(dev, "device", "drive_frequency_hz", false);
    const auto lambda = rd.number(dev, "device", "wavelength_nm", false);
    if (dev && !f_d && !lambda) rd.problems.emplace_back("missing required key device.drive_frequency_hz (or device.wavelength_nm)");
    if (f_d && lambda) rd.problems.emplace_back("give only one of device.drive_frequency_hz and device.wavelength_nm");
    const auto f_a = rd.number(dev, "device", "cavity_frequency_hz", false);
    const auto kappa = rd.number(dev, "device", "kappa_a_hz", true);
    const auto wm = rd.number(dev, "device", "omega_m_hz", true);
    const auto gm = rd.number(dev, "device", "gamma_m_hz", true);
    const auto mass = rd.number(dev, "device", "mass_ng", true);
    const auto len = rd.number(dev, "device", "length_cm", true);

    const json* drive = rd.section("drive", true);
    rd.reject_unknown(drive, "drive", {"power_mw", "theta_rad"});
    const auto power = rd.number(drive, "drive", "power_mw", true);
    const auto theta = rd.number(drive, "drive", "theta_rad", false);

    const json* bath = rd.section("bath", true);
    rd.reject_unknown(bath, "bath", {"temperature_k"});
    const auto temp = rd.number(bath, "bath", "temperature_k", true);

    const json* cpl = rd.section("coupling", true);
    rd.reject_unknown(cpl, "coupling", {"scenario", "g_omega_hz", "g_kappa_hz"});
    const auto scenario = rd.string(cpl, "coupling", "scenario", true);
    const auto gw = rd.number(cpl, "coupling", "g_omega_hz", false);
    const auto gk = rd.number(cpl, "coupling", "g_kappa_hz", false);
    if (scenario) {
        if (*scenario == "coherent") cfg.scenario = CouplingKind::Coherent;
        else if (*scenario == "dissipative") cfg.scenario = CouplingKind::Dissipative;
        else if (*scenario == "cooperative") cfg.scenario = CouplingKind::Cooperative;
        else rd.problems.push_back("coupling.scenario must be coherent, dissipative or cooperative (got \"" + *scenario + "\")");
    }

    const json* det = rd.section("detuning", true);
    rd.reject_unknown(det, "detuning", {"mode", "delta_a_hz", "delta_a_over_kappa", "delta_s_hz", "delta_s_over_omega_m"});
    const auto mode = rd.string(det, "detuning", "mode", true);
    if (mode) {
        if (*mode == "bare-detuning") cfg.mode = SteadyStateMode::BareDetuning;
        else if (*mode == "effective-detuning") cfg.mode = SteadyStateMode::EffectiveDetuning;
        else if (*mode == "operating-point") cfg.mode = SteadyStateMode::OperatingPoint;
        else rd.problems.push_back("detuning.mode must be bare-detuning, effective-detuning or operating-point (got \"" + *mode + "\")");
    }
    const auto da_hz = rd.number(det, "detuning", "delta_a_hz", false);
    const auto da_k = rd.number(det, "detuning", "delta_a_over_kappa", false);
    const auto ds_hz = rd.number(det, "detuning", "delta_s_hz", false);
    const auto ds_m = rd.number(det, "detuning", "delta_s_over_omega_m", false);
    const int given = int(da_hz.has_value()) + int(da_k.has_value()) + int(ds_hz.has_value()) + int(ds_m.has_value());
    if (det && given != 1)
        rd.problems.emplace_back("detuning needs exactly one of delta_a_hz, delta_a_over_kappa, delta_s_hz, delta_s_over_omega_m");
    if (mode && given == 1) {
        const bool bare = cfg.mode == SteadyStateMode::BareDetuning;
        if (bare && (ds_hz || ds_m)) rd.problems.emplace_back("bare-detuning mode takes delta_a_hz or delta_a_over_kappa");
        if (!bare && (da_hz || da_k)) rd.problems.emplace_back("effective modes take delta_s_hz or delta_s_over_omega_m");
    }

    // Physical parameters.
    auto& p = cfg.params;
    if (f_d) p.omega_d = two_pi * *f_d;
    if (lambda) p.omega_d = two_pi * constants::speed_of_light / (*lambda * 1e-9);
    if (kappa) p.kappa_a = two_pi * *kappa;
    if (wm) p.omega_m = two_pi * *wm;
    if (gm) p.gamma_m = two_pi * *gm;
    if (mass) p.mass = *mass * 1e-12;
    if (len) p.length_L = *len * 1e-2;
    if (power) p.power = *power * 1e-3;
    if (temp) p.temperature = *temp;
    if (theta) p.theta = *theta;
    p.g_omega = two_pi * gw.value_or(0.0);
    p.g_kappa = two_pi * gk.value_or(0.0);
    if (da_hz) cfg.detuning = two_pi * *da_hz;
    if (da_k) cfg.detuning = *da_k * p.kappa_a;
    if (ds_hz) cfg.detuning = two_pi * *ds_hz;
    if (ds_m) cfg.detuning = *ds_m * p.omega_m;
    p.omega_a = f_a ? two_pi * *f_a : p.omega_d + cfg.detuning;

    // Sweep axes.
    if (const json* sw = rd.section("sweep", false)) {
        rd.reject_unknown(sw, "sweep", {"axes", "jobs"});
        if (auto j = rd.number(sw, "sweep", "jobs", false)) {
            if (*j >= 1 && std::floor(*j) == *j) cfg.jobs = static_cast<unsigned>(*j);
            else rd.problems.emplace_back("sweep.jobs must be a positive integer");
        }
        auto it = sw->find("axes");
        if (it == sw->end() || !it->is_array() || it->empty() || it->size() > 2) {
            rd.problems.emplace_back("sweep.axes must be an array of one or two axis tables");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i) {
                const json& ax = (*it)[i];
                const std::string where = "sweep.axes[" + std::to_string(i) + "]";
                if (!ax.is_object()) {
                    rd.problems.push_back(where + " must be a table");
                    continue;
                }
                rd.reject_unknown(&ax, where, {"name", "min", "max", "points", "spacing"});
                const auto name = rd.string(&ax, where.c_str(), "name", true);
                const auto lo = rd.number(&ax, where.c_str(), "min", true);
                const auto hi = rd.number(&ax, where.c_str(), "max", true);
                const auto n = rd.number(&ax, where.c_str(), "points", true);
                const auto spacing = rd.string(&ax, where.c_str(), "spacing", false);
                Axis a;
                if (name) {
                    if (auto param = detail::axis_from_name(*name)) a.param = *param;
                    else rd.problems.push_back(where + ".name \"" + *name + "\" is not a sweepable parameter");
                }
                if (n) {
                    if (*n >= 1 && std::floor(*n) == *n) a.points = static_cast<std::size_t>(*n);
                    else rd.problems.push_back(where + ".points must be a positive integer");
                }
                if (spacing) {
                    if (*spacing == "log") a.spacing = Spacing::Log;
                    else if (*spacing != "linear") rd.problems.push_back(where + ".spacing must be linear or log");
                }
                if (lo) a.min = axis_from_human(a.param, *lo);
                if (hi) a.max = axis_from_human(a.param, *hi);
                cfg.axes.push_back(a);
            }
        }
    }

    if (const json* sv = rd.section("survival", false)) {
        rd.reject_unknown(sv, "survival", {"t_max_k"});
        cfg.survival_t_max = rd.number(sv, "survival", "t_max_k", true);
    }

    if (const json* in = rd.section("interferometer", false)) {
        rd.reject_unknown(in, "interferometer", {"bs_reflectivity", "bs_transmissivity", "membrane_reflectivity",
                                                 "membrane_transmissivity", "x_offset_rad", "lossless"});
        InterferometerConfig ic;
        if (auto v = rd.complex_pair(in, "interferometer", "bs_reflectivity")) ic.bs_r = *v;
        if (auto v = rd.complex_pair(in, "interferometer", "bs_transmissivity")) ic.bs_t = *v;
        if (auto v = rd.complex_pair(in, "interferometer", "membrane_reflectivity")) ic.mem_r = *v;
        if (auto v = rd.complex_pair(in, "interferometer", "membrane_transmissivity")) ic.mem_t = *v;
        if (auto v = rd.number(in, "interferometer", "x_offset_rad", false)) ic.x_offset = *v;
        if (auto v = rd.boolean(in, "interferometer", "lossless")) ic.lossless = *v;
        cfg.interferometer = ic;
    }

    if (const json* out = rd.section("output", false)) {
        rd.reject_unknown(out, "output", {"csv", "json"});
        cfg.output.csv = rd.string(out, "output", "csv", false);
        cfg.output.json = rd.string(out, "output", "json", false);
    }

    // Semantic checks on the assembled values, only once the shape is right.
    if (rd.problems.empty()) {
        for (const auto& e : validate_params(p).errors) rd.problems.push_back(e);
        if (!cfg.axes.empty()) {
            for (const auto& v : sweep_spec_violations(cfg.sweep_spec())) rd.problems.push_back("sweep: " + v);
        } else {
            for (const auto& v : scenario_violations(cfg.scenario, p.g_omega, p.g_kappa)) rd.problems.push_back(v);
        }
        if (cfg.survival_t_max && !(*cfg.survival_t_max > kSurvivalReferenceTemperature))
            rd.problems.emplace_back("survival.t_max_k must exceed 0.01 K");
        if (cfg.interferometer) {
            const InterferometerParams ip = cfg.interferometer_params();
            for (const auto& v : interferometer_violations(ip)) rd.problems.push_back("interferometer: " + v);
        }
    }
    if (!rd.problems.empty()) throw ConfigError(rd.problems);
    return cfg;
}

inline ConfigFormat format_for_path(const std::string& path) {
    auto ends_with = [&](std::string_view s) { return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0; };
    if (ends_with(".json")) return ConfigFormat::Json;
    if (ends_with(".toml")) return ConfigFormat::Toml;
    throw ConfigError({"cannot infer config format from \"" + path + "\" (expected .toml or .json)"});
}

inline RunConfig load_config(const std::string& path) {
    const ConfigFormat format = format_for_path(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file \"" + path + "\""});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), format);
}

} // namespace optomech::io
