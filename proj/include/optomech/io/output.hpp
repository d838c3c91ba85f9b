#pragma once

// Grid CSV (one row per point) and JSON summaries. Numbers use the shortest
// round-trip representation so output is byte-stable and lossless.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optomech/error.hpp"
#include "optomech/io/config.hpp"
#include "optomech/sweep.hpp"

namespace optomech::io {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::Config, "malformed number \"" + std::string(s) + "\"");
    return v;
}

inline std::vector<std::string> csv_header(const SweepResult& r) {
    std::vector<std::string> h;
    for (const Axis& a : r.axes) h.push_back(axis_column(a.param));
    h.insert(h.end(), {"x_s", "stable", "E_N"});
    return h;
}

inline void write_csv(std::ostream& os, const SweepResult& r) {
    const auto header = csv_header(r);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const PointResult& pt = r.points[i];
        for (std::size_t k = 0; k < r.axes.size(); ++k)
            os << format_number(axis_to_human(r.axes[k].param, r.coords[i][k])) << ',';
        if (pt.state) os << format_number(pt.state->x_s);
        os << ',' << (pt.stable ? 1 : 0) << ',';
        if (pt.log_negativity) os << format_number(*pt.log_negativity);
        os << '\n';
    }
}

inline std::string to_csv(const SweepResult& r) {
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;  // empty field -> nullopt

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw Error(ErrorCode::Config, "no CSV column \"" + name + "\"");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::Config, "empty CSV");
    t.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != t.header.size())
            throw Error(ErrorCode::Config, "CSV line " + std::to_string(lineno) + " has " +
                                               std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(t.header.size()));
        std::vector<std::optional<double>> row;
        for (const auto& f : fields) row.push_back(parse_number(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct SweepStatistics {
    std::size_t points = 0;
    std::size_t feasible = 0;
    std::size_t stable = 0;
    std::size_t entangled = 0;
    double max_lyapunov_residual = 0.0;
    double min_symplectic_eigenvalue = 0.0;
    std::size_t unphysical = 0;
    std::size_t stability_disagreements = 0;
    std::size_t ramp_jumps = 0;
};

inline SweepStatistics sweep_statistics(const SweepResult& r) {
    SweepStatistics s;
    s.points = r.points.size();
    bool first = true;
    for (const PointResult& p : r.points) {
        s.feasible += p.feasible;
        s.ramp_jumps += p.diagnostics.ramp_jumped;
        if (p.feasible && p.diagnostics.routh_hurwitz_stable != p.diagnostics.spectral_stable)
            ++s.stability_disagreements;
        if (!p.stable) continue;
        ++s.stable;
        if (!p.log_negativity) continue;
        s.entangled += *p.log_negativity > 0.0;
        s.max_lyapunov_residual = std::max(s.max_lyapunov_residual, p.diagnostics.lyapunov_residual);
        s.unphysical += !p.diagnostics.physical;
        s.min_symplectic_eigenvalue =
            first ? p.diagnostics.nu_minus : std::min(s.min_symplectic_eigenvalue, p.diagnostics.nu_minus);
        first = false;
    }
    return s;
}

inline json sweep_summary(const SweepResult& r) {
    json j;
    j["axes"] = json::array();
    for (const Axis& a : r.axes)
        j["axes"].push_back({{"name", to_string(a.param)},
                             {"column", axis_column(a.param)},
                             {"min", axis_to_human(a.param, a.min)},
                             {"max", axis_to_human(a.param, a.max)},
                             {"points", a.points},
                             {"spacing", a.spacing == Spacing::Log ? "log" : "linear"}});
    const SweepStatistics s = sweep_statistics(r);
    j["points"] = s.points;
    j["feasible"] = s.feasible;
    j["stable"] = s.stable;
    j["entangled"] = s.entangled;
    j["max_lyapunov_residual"] = s.max_lyapunov_residual;
    j["min_symplectic_eigenvalue"] = s.min_symplectic_eigenvalue;
    j["unphysical"] = s.unphysical;
    j["stability_disagreements"] = s.stability_disagreements;
    j["ramp_jumps"] = s.ramp_jumps;
    if (r.optimum) {
        json coords = json::object();
        for (std::size_t k = 0; k < r.axes.size(); ++k)
            coords[axis_column(r.axes[k].param)] = axis_to_human(r.axes[k].param, r.optimum->coords[k]);
        j["optimum"] = {{"coords", coords}, {"index", r.optimum->index}, {"E_N", r.optimum->log_negativity}};
    } else {
        j["optimum"] = nullptr;
    }
    return j;
}

inline json survival_summary(const SurvivalResult& s) {
    return {{"temperature_k", s.temperature},
            {"saturated", s.saturated},
            {"lower_k", s.lower},
            {"upper_k", s.upper},
            {"evaluations", s.evaluations}};
}

} // namespace optomech::io
