// config.hpp — Flat key-value run configuration: parsing, canonical
// serialization (the provenance header every output echoes), and presets.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zenometry/csv.hpp"
#include "zenometry/noise.hpp"
#include "zenometry/spectra.hpp"
#include "zenometry/util.hpp"

namespace zenometry {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time-grid violations (Nyquist); mapped to its own CLI exit code.
struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // noise model
    double lambda = 1.0;    // reorganization energy, rad/ms
    double gamma = 1.0;     // relaxation rate, rad/ms
    double omega_b = 0.02;  // harmonic base frequency, rad/ms
    int harmonics = 50;
    double beta_temp = 1.0;  // inverse temperature, ms
    double omega0 = 10.0;    // probed frequency, rad/ms
    std::optional<double> alpha_z{};  // unset -> calibrate to target_c
    double target_c = 0.37;           // ms^-2
    // ensemble
    int samples = 20;
    int slices = 1000;
    std::uint64_t seed = 12345;
    // probe
    int qubits = 7;
    std::vector<int> n_range{2, 3, 4, 5, 6, 7};
    std::string probe = "both";  // unentangled | ghz | both
    // metrology
    double total_time = 10.0;
    double grid_start = 0.0;
    double grid_stop = 1.2;
    int grid_points = 481;
    // flags
    bool lindblad_factor_two = false;
    int shot_noise = 0;
    bool noiseless = false;
    bool markovian = false;
    double markovian_rate = 0.37;  // 1/ms
    double oracle_threshold = 0.02;
    std::optional<double> scan_bound{};   // unset -> 2 pi / omega_b
    std::optional<double> fixed_time{};   // unset -> colored-noise t_u of this config
    bool empirical = false;
    bool include_noiseless = false;
    bool dump_trajectories = false;
    bool dump_slices = false;
    bool dump_samples = false;  // per-sample columns in Ramsey CSVs
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed value for '" + key + "': " + v);
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

inline std::vector<int> parse_n_range(const std::string& v) {
    std::vector<int> out;
    const auto dots = v.find("..");
    if (dots != std::string::npos) {
        const int lo = parse_int("n_range", trim(v.substr(0, dots)));
        const int hi = parse_int("n_range", trim(v.substr(dots + 2)));
        if (lo < 1 || hi < lo) throw ConfigError("config: bad n_range '" + v + "'");
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const int n = parse_int("n_range", item);
        if (n < 1) throw ConfigError("config: bad n_range entry '" + item + "'");
        out.push_back(n);
    }
    if (out.empty()) throw ConfigError("config: empty n_range");
    return out;
}

inline std::string render_n_range(const std::vector<int>& ns) {
    bool contiguous = ns.size() >= 2;
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (ns[i + 1] != ns[i] + 1) contiguous = false;
    if (contiguous) return std::to_string(ns.front()) + ".." + std::to_string(ns.back());
    std::string out;
    for (std::size_t i = 0; i < ns.size(); ++i)
        out += (i ? "," : "") + std::to_string(ns[i]);
    return out;
}

inline std::string render_optional(const std::optional<double>& v) {
    return v ? format_full(*v) : "auto";
}

} // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "omega_b") cfg.omega_b = parse_double(key, value);
    else if (key == "harmonics") cfg.harmonics = parse_int(key, value);
    else if (key == "beta_temp") cfg.beta_temp = parse_double(key, value);
    else if (key == "omega0") cfg.omega0 = parse_double(key, value);
    else if (key == "alpha_z")
        cfg.alpha_z = value == "auto" ? std::optional<double>{} : parse_double(key, value);
    else if (key == "target_c") cfg.target_c = parse_double(key, value);
    else if (key == "samples") cfg.samples = parse_int(key, value);
    else if (key == "slices") cfg.slices = parse_int(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "qubits") cfg.qubits = parse_int(key, value);
    else if (key == "n_range") cfg.n_range = parse_n_range(value);
    else if (key == "probe") {
        if (value != "unentangled" && value != "ghz" && value != "both")
            throw ConfigError("config: probe must be unentangled|ghz|both, got '" + value + "'");
        cfg.probe = value;
    }
    else if (key == "total_time") cfg.total_time = parse_double(key, value);
    else if (key == "grid_start") cfg.grid_start = parse_double(key, value);
    else if (key == "grid_stop") cfg.grid_stop = parse_double(key, value);
    else if (key == "grid_points") cfg.grid_points = parse_int(key, value);
    else if (key == "lindblad_factor_two") cfg.lindblad_factor_two = parse_bool(key, value);
    else if (key == "shot_noise") cfg.shot_noise = parse_int(key, value);
    else if (key == "noiseless") cfg.noiseless = parse_bool(key, value);
    else if (key == "markovian") cfg.markovian = parse_bool(key, value);
    else if (key == "markovian_rate") cfg.markovian_rate = parse_double(key, value);
    else if (key == "oracle_threshold") cfg.oracle_threshold = parse_double(key, value);
    else if (key == "scan_bound")
        cfg.scan_bound = value == "auto" ? std::optional<double>{} : parse_double(key, value);
    else if (key == "fixed_time")
        cfg.fixed_time = value == "auto" ? std::optional<double>{} : parse_double(key, value);
    else if (key == "empirical") cfg.empirical = parse_bool(key, value);
    else if (key == "include_noiseless") cfg.include_noiseless = parse_bool(key, value);
    else if (key == "dump_trajectories") cfg.dump_trajectories = parse_bool(key, value);
    else if (key == "dump_slices") cfg.dump_slices = parse_bool(key, value);
    else if (key == "dump_samples") cfg.dump_samples = parse_bool(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
// Unknown keys are hard errors.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        apply_config_entry(base, key, value);
    }
    return base;
}

// Canonical `key = value` rendering; parse_config_text of this text
// reconstructs the configuration exactly.
inline std::vector<std::string> serialize_config(const RunConfig& c) {
    using detail::render_n_range;
    using detail::render_optional;
    std::vector<std::string> out;
    auto put = [&out](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
    put("lambda", format_full(c.lambda));
    put("gamma", format_full(c.gamma));
    put("omega_b", format_full(c.omega_b));
    put("harmonics", std::to_string(c.harmonics));
    put("beta_temp", format_full(c.beta_temp));
    put("omega0", format_full(c.omega0));
    put("alpha_z", render_optional(c.alpha_z));
    put("target_c", format_full(c.target_c));
    put("samples", std::to_string(c.samples));
    put("slices", std::to_string(c.slices));
    put("seed", std::to_string(c.seed));
    put("qubits", std::to_string(c.qubits));
    put("n_range", render_n_range(c.n_range));
    put("probe", c.probe);
    put("total_time", format_full(c.total_time));
    put("grid_start", format_full(c.grid_start));
    put("grid_stop", format_full(c.grid_stop));
    put("grid_points", std::to_string(c.grid_points));
    put("lindblad_factor_two", c.lindblad_factor_two ? "true" : "false");
    put("shot_noise", std::to_string(c.shot_noise));
    put("noiseless", c.noiseless ? "true" : "false");
    put("markovian", c.markovian ? "true" : "false");
    put("markovian_rate", format_full(c.markovian_rate));
    put("oracle_threshold", format_full(c.oracle_threshold));
    put("scan_bound", render_optional(c.scan_bound));
    put("fixed_time", render_optional(c.fixed_time));
    put("empirical", c.empirical ? "true" : "false");
    put("include_noiseless", c.include_noiseless ? "true" : "false");
    put("dump_trajectories", c.dump_trajectories ? "true" : "false");
    put("dump_slices", c.dump_slices ? "true" : "false");
    put("dump_samples", c.dump_samples ? "true" : "false");
    return out;
}

inline std::uint64_t config_hash(const RunConfig& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& line : serialize_config(c))
        for (unsigned char ch : line) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
    return h;
}

// Shipped experiment presets.
inline RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    if (name == "paper-n7") {
        cfg.qubits = 7;
        cfg.probe = "both";
        return cfg;
    }
    if (name == "paper-scaling") {
        cfg.n_range = {2, 3, 4, 5, 6, 7};
        cfg.empirical = false;
        return cfg;
    }
    if (name == "noiseless-scaling") {
        cfg.n_range = {2, 3, 4, 5, 6, 7};
        cfg.noiseless = true;
        return cfg;
    }
    throw ConfigError("config: unknown preset '" + name + "'");
}

inline void validate_config(const RunConfig& c) {
    if (!(c.lambda > 0.0) || !(c.gamma > 0.0)) throw ConfigError("config: lambda and gamma must be > 0");
    if (!(c.omega_b > 0.0)) throw ConfigError("config: omega_b must be > 0");
    if (c.harmonics < 1) throw ConfigError("config: harmonics must be >= 1");
    if (!(c.beta_temp > 0.0)) throw ConfigError("config: beta_temp must be > 0");
    if (!(c.omega0 > 0.0)) throw ConfigError("config: omega0 must be > 0");
    if (c.alpha_z && *c.alpha_z < 0.0) throw ConfigError("config: alpha_z must be >= 0");
    if (!(c.target_c > 0.0)) throw ConfigError("config: target_c must be > 0");
    if (c.samples < 1) throw ConfigError("config: samples must be >= 1");
    if (c.slices < 1) throw ConfigError("config: slices must be >= 1");
    if (c.qubits < 1) throw ConfigError("config: qubits must be >= 1");
    if (!(c.total_time > 0.0)) throw ConfigError("config: total_time must be > 0");
    if (c.grid_points < 2) throw ConfigError("config: grid_points must be >= 2");
    if (!(c.grid_stop > c.grid_start) || c.grid_start < 0.0)
        throw ConfigError("config: need 0 <= grid_start < grid_stop");
    if (c.shot_noise < 0) throw ConfigError("config: shot_noise must be >= 0");
    if (!(c.markovian_rate > 0.0)) throw ConfigError("config: markovian_rate must be > 0");
    if (!(c.oracle_threshold > 0.0)) throw ConfigError("config: oracle_threshold must be > 0");
    if (c.scan_bound && !(*c.scan_bound > 0.0)) throw ConfigError("config: scan_bound must be > 0");
    if (c.fixed_time && !(*c.fixed_time > 0.0)) throw ConfigError("config: fixed_time must be > 0");
}

inline NoiseModel build_noise_model(const RunConfig& c) {
    validate_config(c);
    NoiseModelParams p;
    p.density = SpectralDensity(DrudeLorentz{c.lambda, c.gamma});
    p.base_freq = c.omega_b;
    p.harmonic_count = c.harmonics;
    p.inverse_temp = c.beta_temp;
    p.system_freq = c.omega0;
    if (c.noiseless) {
        p.alpha_z = 0.0;
        return NoiseModel(p);
    }
    if (c.alpha_z) {
        p.alpha_z = *c.alpha_z;
        return NoiseModel(p);
    }
    p.alpha_z = 1.0;
    return NoiseModel(p).calibrated(c.target_c);
}

inline EnsembleConfig build_ensemble(const RunConfig& c, int qubit_count) {
    return EnsembleConfig{c.samples, c.slices, c.seed, qubit_count};
}

inline std::vector<double> build_time_grid(const RunConfig& c) {
    return linspace(c.grid_start, c.grid_stop, static_cast<std::size_t>(c.grid_points));
}

} // namespace zenometry
