#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "beamosc/errors.hpp"
#include "beamosc/io.hpp"
#include "beamosc/model.hpp"
#include "beamosc/tdse.hpp"

namespace beamosc {

enum class ScenarioKind { classical, partial, full, measure, sweep, compare };

struct NumericsConfig {
    double dt = 1e-3;
    int grid_points = 513;
    double grid_halfwidth = 12.0; // in units of the oscillator length
    double t_start = std::numeric_limits<double>::quiet_NaN(); // NaN: derive from window and speed
    double t_end = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 12345;
    std::uint64_t n_samples = 10000;
    int stride = 10; // observer/output sampling interval in steps
    Scheme scheme = Scheme::implicit_midpoint;
};

// Tolerances used by the comparison report; kept in one place and
// overridable from the config file.
struct ToleranceConfig {
    double amplitude = 0.01; // measured vs closed-form classical amplitude
    double p1_tdse = 0.05;   // evolved vs closed-form excitation probability
    double p1_cross = 0.05;  // scattering vs driven-oscillator probability
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::compare; // set by the CLI subcommand
    ModelParams params;
    WindowFunction window = WindowFunction::gaussian(10.0);
    double k0 = std::numeric_limits<double>::quiet_NaN(); // NaN: use m*v/hbar
    NumericsConfig numerics;
    ToleranceConfig tolerances;
    std::vector<double> v_list;
    std::vector<double> alpha_list;
    std::string output_dir; // set by the CLI

    double k0_or_default() const {
        return std::isnan(k0) ? params.beam_wavenumber() : k0;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view value, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw config_error("invalid number '" + std::string(value) + "' for key '" + key + "'");
    }
    return out;
}

template <typename Int>
Int parse_integer(std::string_view value, const std::string& key) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw config_error("invalid integer '" + std::string(value) + "' for key '" + key + "'");
    }
    return out;
}

inline std::vector<double> parse_list(std::string_view value, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        const std::string_view item =
            trim(value.substr(start, comma == std::string_view::npos ? value.size() - start
                                                                     : comma - start));
        if (item.empty()) {
            throw config_error("empty entry in list for key '" + key + "'");
        }
        out.push_back(parse_double(item, key));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

// Parses the flat key = value configuration format. Lines starting with '#'
// and blank lines are skipped; unknown or repeated keys are errors.
inline ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    double window_b = 10.0;
    std::string window_kind = "gaussian";

    std::map<std::string, std::function<void(std::string_view)>> setters;
    const auto number = [](double& slot) {
        return [&slot](std::string_view v) { slot = detail::parse_double(v, "value"); };
    };
    setters["hbar"] = number(cfg.params.hbar);
    setters["m"] = number(cfg.params.m);
    setters["mu"] = number(cfg.params.mu);
    setters["omega0"] = number(cfg.params.omega0);
    setters["alpha"] = number(cfg.params.alpha);
    setters["v"] = number(cfg.params.v);
    setters["k0"] = number(cfg.k0);
    setters["window.kind"] = [&](std::string_view v) { window_kind = std::string(v); };
    setters["window.b"] = number(window_b);
    setters["numerics.dt"] = number(cfg.numerics.dt);
    setters["numerics.grid_points"] = [&](std::string_view v) {
        cfg.numerics.grid_points = detail::parse_integer<int>(v, "numerics.grid_points");
    };
    setters["numerics.grid_halfwidth"] = number(cfg.numerics.grid_halfwidth);
    setters["numerics.t_start"] = number(cfg.numerics.t_start);
    setters["numerics.t_end"] = number(cfg.numerics.t_end);
    setters["numerics.seed"] = [&](std::string_view v) {
        cfg.numerics.seed = detail::parse_integer<std::uint64_t>(v, "numerics.seed");
    };
    setters["numerics.n_samples"] = [&](std::string_view v) {
        cfg.numerics.n_samples = detail::parse_integer<std::uint64_t>(v, "numerics.n_samples");
    };
    setters["numerics.stride"] = [&](std::string_view v) {
        cfg.numerics.stride = detail::parse_integer<int>(v, "numerics.stride");
    };
    setters["numerics.scheme"] = [&](std::string_view v) {
        if (v == "implicit_midpoint") {
            cfg.numerics.scheme = Scheme::implicit_midpoint;
        } else if (v == "leapfrog") {
            cfg.numerics.scheme = Scheme::leapfrog;
        } else {
            throw config_error("numerics.scheme must be implicit_midpoint or leapfrog");
        }
    };
    setters["sweep.v_list"] = [&](std::string_view v) {
        cfg.v_list = detail::parse_list(v, "sweep.v_list");
    };
    setters["sweep.alpha_list"] = [&](std::string_view v) {
        cfg.alpha_list = detail::parse_list(v, "sweep.alpha_list");
    };
    setters["tol.amplitude"] = number(cfg.tolerances.amplitude);
    setters["tol.p1_tdse"] = number(cfg.tolerances.p1_tdse);
    setters["tol.p1_cross"] = number(cfg.tolerances.p1_cross);
    setters["output.dir"] = [&](std::string_view v) { cfg.output_dir = std::string(v); };

    std::vector<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = detail::trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw config_error("line " + std::to_string(line_no) + " is not 'key = value'");
        }
        const std::string key{detail::trim(stripped.substr(0, eq))};
        const std::string_view value = detail::trim(stripped.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw config_error("unknown config key '" + key + "'");
        }
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw config_error("duplicate config key '" + key + "'");
        }
        seen.push_back(key);
        it->second(value);
    }

    if (window_kind != "gaussian") {
        throw config_error("window.kind must be 'gaussian'; tabulated windows are "
                           "constructed programmatically");
    }
    cfg.window = WindowFunction::gaussian(window_b);
    return cfg;
}

inline ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

// Validation of every numeric field against the module preconditions, run
// before any computation starts.
inline void validate_config(const ScenarioConfig& cfg) {
    cfg.params.validate();
    const auto& n = cfg.numerics;
    if (!(n.dt > 0.0) || !std::isfinite(n.dt)) throw config_error("numerics.dt must be positive");
    if (n.grid_points < 3) throw config_error("numerics.grid_points must be at least 3");
    if (!(n.grid_halfwidth > 0.0)) throw config_error("numerics.grid_halfwidth must be positive");
    if (n.stride < 1) throw config_error("numerics.stride must be at least 1");
    if (n.n_samples < 1) throw config_error("numerics.n_samples must be at least 1");
    if (std::isnan(n.t_start) != std::isnan(n.t_end)) {
        throw config_error("numerics.t_start and numerics.t_end must be given together");
    }
    if (!std::isnan(n.t_start) && !(n.t_start < n.t_end)) {
        throw config_error("numerics.t_start must be less than numerics.t_end");
    }
    if (!std::isnan(cfg.k0) && !(cfg.k0 > 0.0)) throw config_error("k0 must be positive");
    for (double v : cfg.v_list) {
        if (v == 0.0 || !std::isfinite(v)) throw config_error("sweep.v_list entries must be nonzero");
    }
    for (double a : cfg.alpha_list) {
        if (!std::isfinite(a)) throw config_error("sweep.alpha_list entries must be finite");
    }
    if (!(cfg.tolerances.amplitude > 0.0) || !(cfg.tolerances.p1_tdse > 0.0) ||
        !(cfg.tolerances.p1_cross > 0.0)) {
        throw config_error("tol.* values must be positive");
    }
}

// Canonical text form: fixed key order, 17 significant digits, keys with
// automatic defaults omitted while unset. parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    const auto emit = [&](const char* key, const std::string& value) {
        out << key << " = " << value << "\n";
    };
    emit("hbar", detail::format_number(cfg.params.hbar));
    emit("m", detail::format_number(cfg.params.m));
    emit("mu", detail::format_number(cfg.params.mu));
    emit("omega0", detail::format_number(cfg.params.omega0));
    emit("alpha", detail::format_number(cfg.params.alpha));
    emit("v", detail::format_number(cfg.params.v));
    if (!std::isnan(cfg.k0)) emit("k0", detail::format_number(cfg.k0));
    emit("window.kind", "gaussian");
    emit("window.b", detail::format_number(cfg.window.b()));
    emit("numerics.dt", detail::format_number(cfg.numerics.dt));
    emit("numerics.grid_points", std::to_string(cfg.numerics.grid_points));
    emit("numerics.grid_halfwidth", detail::format_number(cfg.numerics.grid_halfwidth));
    if (!std::isnan(cfg.numerics.t_start)) {
        emit("numerics.t_start", detail::format_number(cfg.numerics.t_start));
        emit("numerics.t_end", detail::format_number(cfg.numerics.t_end));
    }
    emit("numerics.seed", std::to_string(cfg.numerics.seed));
    emit("numerics.n_samples", std::to_string(cfg.numerics.n_samples));
    emit("numerics.stride", std::to_string(cfg.numerics.stride));
    emit("numerics.scheme", cfg.numerics.scheme == Scheme::implicit_midpoint
                                ? "implicit_midpoint"
                                : "leapfrog");
    const auto emit_list = [&](const char* key, const std::vector<double>& list) {
        if (list.empty()) return;
        std::string joined;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0) joined += ", ";
            joined += detail::format_number(list[i]);
        }
        emit(key, joined);
    };
    emit_list("sweep.v_list", cfg.v_list);
    emit_list("sweep.alpha_list", cfg.alpha_list);
    emit("tol.amplitude", detail::format_number(cfg.tolerances.amplitude));
    emit("tol.p1_tdse", detail::format_number(cfg.tolerances.p1_tdse));
    emit("tol.p1_cross", detail::format_number(cfg.tolerances.p1_cross));
    if (!cfg.output_dir.empty()) emit("output.dir", cfg.output_dir);
    return out.str();
}

} // namespace beamosc
