// zenometry — batch driver for colored-dephasing Ramsey metrology studies:
// noise spectra, ensemble simulations, sensitivity analytics, n-scaling
// sweeps, and the master-equation cross-check.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zenometry/config.hpp"
#include "zenometry/csv.hpp"
#include "zenometry/dynamics.hpp"
#include "zenometry/experiment.hpp"
#include "zenometry/fitting.hpp"
#include "zenometry/metrology.hpp"
#include "zenometry/noise.hpp"
#include "zenometry/spectra.hpp"

namespace {

using namespace zenometry;

constexpr int kExitConfigError = 2;
constexpr int kExitGridError = 3;
constexpr int kExitOracleFailure = 4;

struct OracleFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cli {
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out_dir = ".";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig assemble_config(const Cli& cli) {
    RunConfig cfg = cli.preset ? preset_config(*cli.preset) : RunConfig{};
    if (cli.config_path) cfg = parse_config_text(read_file(*cli.config_path), cfg);
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.workers < 1) throw ConfigError("config: --workers must be >= 1");
    validate_config(cfg);
    return cfg;
}

// Provenance header shared by every output file: the effective configuration
// in config-file syntax (after `# cfg `), then derived metadata as notes.
std::vector<std::string> header_lines(const RunConfig& cfg, const std::string& command,
                                      std::optional<std::uint64_t> spectral_hash = {}) {
    std::vector<std::string> out;
    for (const auto& line : serialize_config(cfg)) out.push_back("cfg " + line);
    out.push_back("note command = " + command);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    out.push_back(std::string("note config_hash = ") + buf);
    if (spectral_hash) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(*spectral_hash));
        out.push_back(std::string("note model_hash = ") + buf);
    }
    return out;
}

CsvTable make_table(const RunConfig& cfg, const std::string& command,
                    std::optional<std::uint64_t> spectral_hash = {}) {
    CsvTable table;
    for (auto& line : header_lines(cfg, command, spectral_hash)) table.add_comment(line);
    return table;
}

std::filesystem::path out_path(const Cli& cli, const std::string& name) {
    std::filesystem::create_directories(cli.out_dir);
    return std::filesystem::path(cli.out_dir) / name;
}

std::vector<ProbeKind> selected_probes(const RunConfig& cfg) {
    if (cfg.probe == "unentangled") return {ProbeKind::Unentangled};
    if (cfg.probe == "ghz") return {ProbeKind::Ghz};
    return {ProbeKind::Unentangled, ProbeKind::Ghz};
}

void require_simulable(const RunConfig& cfg, const std::string& command) {
    if (cfg.markovian)
        throw ConfigError("config: the constant-rate (markovian) substitute is analytic only; '" +
                          command + "' needs a synthesizable spectrum");
}

void check_nyquist(const RunConfig& cfg, std::span<const double> grid, int n) {
    if (!grid_satisfies_nyquist(grid, n, cfg.omega0)) {
        const double limit = nyquist_interval(n, cfg.omega0);
        std::ostringstream msg;
        msg << "time grid violates the Nyquist rate for the n*omega0 fringe: need spacing < "
            << format_full(limit) << " ms (>= "
            << static_cast<int>(std::ceil((cfg.grid_stop - cfg.grid_start) / limit)) + 1
            << " points on the configured window)";
        throw GridError(msg.str());
    }
}

RootOptions root_options(const RunConfig& cfg) {
    RootOptions opts;
    opts.scan_bound = cfg.scan_bound ? *cfg.scan_bound : 2.0 * std::numbers::pi / cfg.omega_b;
    return opts;
}

// The colored-noise t_u of this configuration; used as the common evaluation
// time for noiseless sweeps.
double resolve_fixed_time(const RunConfig& cfg) {
    if (cfg.fixed_time) return *cfg.fixed_time;
    RunConfig colored = cfg;
    colored.noiseless = false;
    const auto model = build_noise_model(colored);
    return optimal_time(model, ProbeKind::Unentangled, 1, root_options(cfg));
}

nlohmann::json fit_to_json(const FitResult& fit, const ProbeSpec& probe) {
    nlohmann::json j;
    j["probe"] = to_string(probe.kind);
    j["qubits"] = probe.qubit_count;
    j["omega_hat"] = fit.omega_hat;
    j["c_hat"] = fit.c_hat;
    j["fringe_omega"] = fit.omega_hat *
                        (probe.kind == ProbeKind::Ghz ? probe.qubit_count : 1);
    j["envelope_coefficient"] = fit.c_hat * probe.qubit_count;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["residual_rms"] = fit.residual_rms;
    j["covariance"] = fit.covariance;
    if (!fit.node_times.empty()) {
        j["node_times"] = fit.node_times;
        j["gamma_nodes"] = fit.gamma_nodes;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fit.input_fingerprint));
    j["input_fingerprint"] = buf;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << "\n";
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    for (const auto& line : serialize_config(cfg)) {
        const auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

int cmd_spectrum(const Cli& cli) {
    const auto cfg = assemble_config(cli);
    require_simulable(cfg, "spectrum");
    const auto model = build_noise_model(cfg);
    const auto hash = model_hash(model);

    {
        auto table = make_table(cfg, "spectrum", hash);
        table.set_columns({"omega_rad_per_ms", "j_value"});
        const double cutoff = static_cast<double>(cfg.harmonics) * cfg.omega_b;
        for (double w : linspace(0.0, 1.2 * cutoff, 512))
            table.add_row({w, model.density().evaluate(w)});
        table.write_file(out_path(cli, "spectrum_density.csv").string());
    }
    {
        auto table = make_table(cfg, "spectrum", hash);
        table.set_columns({"j", "omega_j_rad_per_ms", "f_value"});
        for (int j = 1; j <= model.harmonic_count(); ++j)
            table.add_row({static_cast<long long>(j), model.omega(j), model.modulation(j)});
        table.write_file(out_path(cli, "spectrum_modulation.csv").string());
    }
    {
        auto table = make_table(cfg, "spectrum", hash);
        table.add_comment("note quadratic_coefficient = " +
                          format_full(model.quadratic_coefficient()));
        table.set_columns({"t_ms", "gamma_factor", "gamma_rate", "gamma_over_t2"});
        for (double t : build_time_grid(cfg)) {
            const double g = model.decoherence_factor(t);
            table.add_row({t, g, model.decoherence_rate(t),
                           t > 0.0 ? g / (t * t) : std::numeric_limits<double>::quiet_NaN()});
        }
        table.write_file(out_path(cli, "spectrum_decoherence.csv").string());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// ramsey
// ---------------------------------------------------------------------------

int cmd_ramsey(const Cli& cli) {
    const auto cfg = assemble_config(cli);
    require_simulable(cfg, "ramsey");
    const auto model = build_noise_model(cfg);
    const auto hash = model_hash(model);
    const auto grid = build_time_grid(cfg);
    const auto probes = selected_probes(cfg);
    for (ProbeKind kind : probes)
        check_nyquist(cfg, grid, kind == ProbeKind::Ghz ? cfg.qubits : 1);

    const EnsembleConfig ensemble = build_ensemble(cfg, cfg.qubits);
    const SimulateOptions sim{cli.workers, cfg.shot_noise, PhaseMethod::Exact};

    for (ProbeKind kind : probes) {
        const ProbeSpec probe{kind, cfg.qubits, cfg.omega0};
        const auto curve = simulate_ramsey(probe, model, ensemble, grid, sim);
        const int fit_n = kind == ProbeKind::Ghz ? cfg.qubits : 1;
        const auto fit = fit_ramsey(curve.times, curve.p_mean, fit_n);
        const std::string tag = to_string(kind);

        auto table = make_table(cfg, "ramsey", hash);
        table.add_comment("note probe = " + tag);
        table.add_comment("note qubits = " + std::to_string(cfg.qubits));
        table.add_comment("note seed = " + std::to_string(cfg.seed));
        std::vector<std::string> cols{"t_ms", "p_mean", "p_stderr", "envelope_fit"};
        if (cfg.dump_samples)
            for (int i = 0; i < cfg.samples; ++i) cols.push_back("p_sample_" + std::to_string(i));
        table.set_columns(std::move(cols));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double envelope =
                0.5 * (1.0 - std::exp(-static_cast<double>(fit_n) * fit.c_hat * grid[k] * grid[k]));
            std::vector<Cell> row{grid[k], curve.p_mean[k], curve.p_stderr[k], envelope};
            if (cfg.dump_samples)
                for (int i = 0; i < cfg.samples; ++i)
                    row.push_back(curve.p_samples.at(static_cast<std::size_t>(i), k));
            table.add_row(row);
        }
        table.write_file(out_path(cli, "ramsey_" + tag + ".csv").string());

        auto spec_table = make_table(cfg, "ramsey", hash);
        spec_table.add_comment("note probe = " + tag);
        spec_table.set_columns({"omega_rad_per_ms", "power"});
        const auto spectrum = fringe_spectrum(curve.times, curve.p_mean, 2048);
        for (std::size_t k = 0; k < spectrum.omega.size(); ++k)
            spec_table.add_row({spectrum.omega[k], spectrum.power[k]});
        spec_table.write_file(out_path(cli, "ramsey_spectrum_" + tag + ".csv").string());

        nlohmann::json j = fit_to_json(fit, probe);
        j["config"] = config_to_json(cfg);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
        j["model_hash"] = buf;
        write_json(out_path(cli, "ramsey_fit_" + tag + ".json"), j);
    }

    if (cfg.dump_trajectories) {
        auto table = make_table(cfg, "ramsey", hash);
        table.set_columns({"sample_id", "qubit_id", "j", "omega_j_rad_per_ms",
                           "amplitude_rad_per_ms", "psi_rad"});
        for (int i = 0; i < cfg.samples; ++i)
            for (int q = 0; q < cfg.qubits; ++q) {
                const auto traj = sample_trajectory(
                    model, {cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(q)});
                for (int j = 1; j <= cfg.harmonics; ++j) {
                    const std::size_t idx = static_cast<std::size_t>(j - 1);
                    table.add_row({static_cast<long long>(i), static_cast<long long>(q),
                                   static_cast<long long>(j), traj.omegas[idx],
                                   traj.amplitudes[idx], traj.phases[idx]});
                }
            }
        table.write_file(out_path(cli, "trajectories.csv").string());
    }

    if (cfg.dump_slices) {
        auto table = make_table(cfg, "ramsey", hash);
        table.add_comment("note t_total_ms = " + format_full(cfg.grid_stop));
        table.set_columns({"sample_id", "qubit_id", "slice_index", "theta_rad"});
        for (int i = 0; i < cfg.samples; ++i)
            for (int q = 0; q < cfg.qubits; ++q) {
                const auto traj = sample_trajectory(
                    model, {cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(q)});
                const auto theta = discretize(traj, cfg.omega0, cfg.grid_stop, cfg.slices);
                for (int s = 0; s < cfg.slices; ++s)
                    table.add_row({static_cast<long long>(i), static_cast<long long>(q),
                                   static_cast<long long>(s),
                                   theta[static_cast<std::size_t>(s)]});
            }
        table.write_file(out_path(cli, "slices.csv").string());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity
// ---------------------------------------------------------------------------

template <DecoherenceSource M>
int sensitivity_with(const Cli& cli, const RunConfig& cfg, const M& model,
                     std::optional<std::uint64_t> hash) {
    const auto grid = build_time_grid(cfg);
    const int n = cfg.qubits;

    auto table = make_table(cfg, "sensitivity", hash);
    table.set_columns({"t_ms", "delta_omega_unentangled", "delta_omega_ghz"});
    const auto du = variance_curve(model, ProbeKind::Unentangled, n, cfg.total_time, grid);
    const auto de = variance_curve(model, ProbeKind::Ghz, n, cfg.total_time, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) table.add_row({grid[k], du[k], de[k]});
    table.write_file(out_path(cli, "sensitivity.csv").string());

    auto optima = make_table(cfg, "sensitivity", hash);
    optima.set_columns({"probe", "n", "t_opt_ms", "delta_omega_min"});
    try {
        const auto opts = root_options(cfg);
        const double tu = optimal_time(model, ProbeKind::Unentangled, n, opts);
        const double te = optimal_time(model, ProbeKind::Ghz, n, opts);
        const double dwu = delta_omega(model, ProbeKind::Unentangled, n, cfg.total_time, tu);
        const double dwe = delta_omega(model, ProbeKind::Ghz, n, cfg.total_time, te);
        optima.add_comment("note ratio = " + format_full(dwu / dwe));
        optima.add_row({std::string("unentangled"), static_cast<long long>(n), tu, dwu});
        optima.add_row({std::string("ghz"), static_cast<long long>(n), te, dwe});
    } catch (const NoOptimumError& e) {
        optima.add_comment("note no interior optimum in (0, " + format_full(e.scan_bound) +
                           "] ms; curves emitted without optima");
        std::cerr << "sensitivity: " << e.what() << "\n";
    }
    optima.write_file(out_path(cli, "sensitivity_optima.csv").string());
    return 0;
}

int cmd_sensitivity(const Cli& cli) {
    const auto cfg = assemble_config(cli);
    if (cfg.markovian)
        return sensitivity_with(cli, cfg, MarkovianRate{cfg.markovian_rate}, std::nullopt);
    const auto model = build_noise_model(cfg);
    return sensitivity_with(cli, cfg, model, model_hash(model));
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

void append_sweep_rows(CsvTable& table, const ScalingReport& report) {
    for (std::size_t i = 0; i < report.unentangled.size(); ++i) {
        const auto& u = report.unentangled[i];
        const auto& e = report.entangled[i];
        table.add_row({std::string("unentangled"), static_cast<long long>(u.n), u.t_opt,
                       u.delta_omega_min, report.ratios[i]});
        table.add_row({std::string("ghz"), static_cast<long long>(e.n), e.t_opt,
                       e.delta_omega_min, report.ratios[i]});
    }
}

void append_exponent_notes(CsvTable& table, const std::string& tag, const PowerLawFit& r,
                           const PowerLawFit& dwe, const PowerLawFit& te) {
    table.add_comment("note " + tag + "_r_exponent = " + format_full(r.exponent) + " +/- " +
                      format_full(r.exponent_stderr));
    table.add_comment("note " + tag + "_delta_e_exponent = " + format_full(dwe.exponent) +
                      " +/- " + format_full(dwe.exponent_stderr));
    table.add_comment("note " + tag + "_t_e_exponent = " + format_full(te.exponent) + " +/- " +
                      format_full(te.exponent_stderr));
}

int cmd_scaling(const Cli& cli) {
    const auto cfg = assemble_config(cli);
    if (cfg.n_range.size() < 3)
        throw ConfigError("config: scaling needs an n_range of at least 3 values");
    if (cfg.empirical && cfg.markovian)
        throw ConfigError("config: the constant-rate substitute cannot be simulated; "
                          "drop 'empirical' or 'markovian'");
    if (cfg.empirical && cfg.noiseless)
        throw ConfigError("config: noiseless dynamics has no interior optimum to fit; "
                          "the noiseless sweep is analytic (drop 'empirical')");

    SweepOptions sweep;
    sweep.total_time = cfg.total_time;
    sweep.root = root_options(cfg);
    if (cfg.noiseless) sweep.fixed_time = resolve_fixed_time(cfg);

    auto fig4 = make_table(cfg, "scaling");
    const bool with_noiseless = cfg.include_noiseless && !cfg.noiseless;
    std::vector<double> fig4_r, fig4_dwe, fig4_r_free, fig4_dwe_free;

    auto table = make_table(cfg, "scaling");
    table.set_columns({"probe", "n", "t_opt_ms", "delta_omega_min", "r"});

    if (cfg.empirical) {
        const auto model = build_noise_model(cfg);
        const auto grid = build_time_grid(cfg);
        int n_max = 0;
        for (int n : cfg.n_range) n_max = std::max(n_max, n);
        check_nyquist(cfg, grid, n_max);
        ExperimentOptions opts;
        opts.total_time = cfg.total_time;
        opts.sim = SimulateOptions{cli.workers, cfg.shot_noise, PhaseMethod::Exact};
        const auto report = empirical_scaling_sweep(model, build_ensemble(cfg, 0), cfg.n_range,
                                                    cfg.omega0, grid, opts);
        append_exponent_notes(table, "empirical", report.ratio_vs_n, report.delta_e_vs_n,
                              report.t_e_vs_n);
        nlohmann::json points = nlohmann::json::array();
        for (const auto& pt : report.points) {
            table.add_row({std::string("unentangled"), static_cast<long long>(pt.n),
                           pt.sens_unentangled.t_opt, pt.sens_unentangled.delta_omega, pt.ratio});
            table.add_row({std::string("ghz"), static_cast<long long>(pt.n), pt.sens_ghz.t_opt,
                           pt.sens_ghz.delta_omega, pt.ratio});
            fig4_r.push_back(pt.ratio);
            fig4_dwe.push_back(pt.sens_ghz.delta_omega);
            nlohmann::json entry;
            entry["n"] = pt.n;
            entry["fit_unentangled"] = fit_to_json(pt.fit_unentangled,
                                                   {ProbeKind::Unentangled, pt.n, cfg.omega0});
            entry["fit_ghz"] = fit_to_json(pt.fit_ghz, {ProbeKind::Ghz, pt.n, cfg.omega0});
            entry["ratio"] = pt.ratio;
            points.push_back(entry);
        }
        nlohmann::json j;
        j["config"] = config_to_json(cfg);
        j["points"] = points;
        j["r_exponent"] = report.ratio_vs_n.exponent;
        j["r_exponent_stderr"] = report.ratio_vs_n.exponent_stderr;
        j["delta_e_exponent"] = report.delta_e_vs_n.exponent;
        j["delta_e_exponent_stderr"] = report.delta_e_vs_n.exponent_stderr;
        write_json(out_path(cli, "scaling_fits.json"), j);
    } else if (cfg.markovian) {
        const MarkovianRate rate{cfg.markovian_rate};
        SweepOptions mk = sweep;
        mk.root = default_root_options(rate);
        if (cfg.scan_bound) mk.root.scan_bound = *cfg.scan_bound;
        const auto report = sensitivity_sweep(rate, cfg.n_range, mk);
        append_exponent_notes(table, "markovian", report.ratio_vs_n, report.delta_e_vs_n,
                              report.t_e_vs_n);
        append_sweep_rows(table, report);
        for (std::size_t i = 0; i < report.ratios.size(); ++i) {
            fig4_r.push_back(report.ratios[i]);
            fig4_dwe.push_back(report.entangled[i].delta_omega_min);
        }
    } else {
        const auto model = build_noise_model(cfg);
        const auto report = sensitivity_sweep(model, cfg.n_range, sweep);
        append_exponent_notes(table, cfg.noiseless ? "noiseless" : "colored", report.ratio_vs_n,
                              report.delta_e_vs_n, report.t_e_vs_n);
        append_sweep_rows(table, report);
        for (std::size_t i = 0; i < report.ratios.size(); ++i) {
            fig4_r.push_back(report.ratios[i]);
            fig4_dwe.push_back(report.entangled[i].delta_omega_min);
        }
    }

    if (with_noiseless) {
        RunConfig free_cfg = cfg;
        free_cfg.noiseless = true;
        SweepOptions free_sweep;
        free_sweep.total_time = cfg.total_time;
        free_sweep.root = root_options(cfg);
        free_sweep.fixed_time = resolve_fixed_time(cfg);
        const auto model = build_noise_model(free_cfg);
        const auto report = sensitivity_sweep(model, cfg.n_range, free_sweep);
        append_exponent_notes(table, "noiseless", report.ratio_vs_n, report.delta_e_vs_n,
                              report.t_e_vs_n);
        append_sweep_rows(table, report);
        for (std::size_t i = 0; i < report.ratios.size(); ++i) {
            fig4_r_free.push_back(report.ratios[i]);
            fig4_dwe_free.push_back(report.entangled[i].delta_omega_min);
        }
    }
    table.write_file(out_path(cli, "scaling.csv").string());

    // gnuplot-ready data + script
    if (with_noiseless)
        fig4.set_columns({"n", "r", "delta_omega_e", "r_noiseless", "delta_omega_e_noiseless"});
    else
        fig4.set_columns({"n", "r", "delta_omega_e"});
    for (std::size_t i = 0; i < cfg.n_range.size(); ++i) {
        if (with_noiseless)
            fig4.add_row({static_cast<long long>(cfg.n_range[i]), fig4_r[i], fig4_dwe[i],
                          fig4_r_free[i], fig4_dwe_free[i]});
        else
            fig4.add_row({static_cast<long long>(cfg.n_range[i]), fig4_r[i], fig4_dwe[i]});
    }
    fig4.write_file(out_path(cli, "scaling_fig4.dat").string());

    std::ofstream gp(out_path(cli, "scaling_fig4.gp"), std::ios::binary);
    for (const auto& line : header_lines(cfg, "scaling")) gp << "# " << line << "\n";
    gp << "# gnuplot script for the sensitivity-scaling figure\n";
    gp << "set datafile separator ','\n";
    gp << "set logscale xy\n";
    gp << "set xlabel 'number of qubits n'\n";
    gp << "set ylabel 'r and delta omega_e'\n";
    gp << "set key left top\n";
    gp << "plot 'scaling_fig4.dat' using 1:2 with linespoints title 'r', \\\n";
    gp << "     'scaling_fig4.dat' using 1:3 with linespoints title 'delta omega_e'";
    if (with_noiseless) {
        gp << ", \\\n     'scaling_fig4.dat' using 1:4 with linespoints title 'r (noiseless)', \\\n";
        gp << "     'scaling_fig4.dat' using 1:5 with linespoints title 'delta omega_e (noiseless)'";
    }
    gp << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check
// ---------------------------------------------------------------------------

int cmd_oracle_check(const Cli& cli) {
    const auto cfg = assemble_config(cli);
    require_simulable(cfg, "oracle-check");
    const auto model = build_noise_model(cfg);
    const auto hash = model_hash(model);
    const auto grid = build_time_grid(cfg);
    const auto probes = selected_probes(cfg);

    IntegratorOptions ode;
    ode.lindblad_factor_two = cfg.lindblad_factor_two;
    const SimulateOptions sim{cli.workers, cfg.shot_noise, PhaseMethod::Exact};

    bool failed = false;
    std::ostringstream failures;
    for (ProbeKind kind : probes) {
        const ProbeSpec probe{kind, cfg.qubits, cfg.omega0};
        const auto report =
            oracle_check(model, probe, build_ensemble(cfg, cfg.qubits), grid, sim, ode);
        const std::string tag = to_string(kind);

        auto table = make_table(cfg, "oracle-check", hash);
        table.add_comment("note probe = " + tag);
        table.add_comment("note max_abs_deviation = " + format_full(report.max_abs_deviation));
        table.add_comment("note mean_abs_deviation = " + format_full(report.mean_abs_deviation));
        table.add_comment("note threshold = " + format_full(cfg.oracle_threshold));
        table.set_columns({"t_ms", "p_monte_carlo", "p_master_equation", "abs_deviation"});
        for (std::size_t k = 0; k < grid.size(); ++k)
            table.add_row({grid[k], report.p_monte_carlo[k], report.p_master_equation[k],
                           std::abs(report.p_monte_carlo[k] - report.p_master_equation[k])});
        table.write_file(out_path(cli, "oracle_" + tag + ".csv").string());

        std::cout << "oracle-check " << tag << ": max "
                  << format_full(report.max_abs_deviation) << ", mean "
                  << format_full(report.mean_abs_deviation) << " (threshold "
                  << format_full(cfg.oracle_threshold) << ")\n";
        if (report.max_abs_deviation > cfg.oracle_threshold) {
            failed = true;
            failures << "  " << tag << ": max deviation "
                     << format_full(report.max_abs_deviation) << " exceeds "
                     << format_full(cfg.oracle_threshold) << "\n";
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double dev =
                    std::abs(report.p_monte_carlo[k] - report.p_master_equation[k]);
                if (dev > cfg.oracle_threshold)
                    failures << "    t=" << format_full(grid[k]) << "  mc="
                             << format_full(report.p_monte_carlo[k]) << "  ode="
                             << format_full(report.p_master_equation[k]) << "  dev="
                             << format_full(dev) << "\n";
            }
        }
    }
    if (failed) throw OracleFailure("oracle deviation above threshold:\n" + failures.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"colored-dephasing Ramsey metrology simulator"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "key = value configuration file")
        ->expected(1);
    app.add_option("--preset", cli.preset,
                   "shipped preset: paper-n7 | paper-scaling | noiseless-scaling");
    app.add_option("--seed", cli.seed, "master seed override");
    app.add_option("--workers", cli.workers, "worker threads for ensemble loops");
    app.add_option("--out", cli.out_dir, "output directory (default .)");

    auto* spectrum = app.add_subcommand("spectrum", "emit J(w), F(w_j), Gamma(t), gamma(t)");
    auto* ramsey = app.add_subcommand("ramsey", "simulate ensemble Ramsey curves and fit them");
    auto* sensitivity =
        app.add_subcommand("sensitivity", "delta-omega curves and optimal measurement points");
    auto* scaling = app.add_subcommand("scaling", "sensitivity scaling across qubit numbers");
    auto* oracle =
        app.add_subcommand("oracle-check", "Monte Carlo vs master-equation cross-validation");
    for (auto* sub : {spectrum, ramsey, sensitivity, scaling, oracle}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (spectrum->parsed()) return cmd_spectrum(cli);
        if (ramsey->parsed()) return cmd_ramsey(cli);
        if (sensitivity->parsed()) return cmd_sensitivity(cli);
        if (scaling->parsed()) return cmd_scaling(cli);
        if (oracle->parsed()) return cmd_oracle_check(cli);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const GridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitGridError;
    } catch (const OracleFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOracleFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
