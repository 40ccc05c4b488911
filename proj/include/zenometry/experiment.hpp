// experiment.hpp — Full measurement pipeline: ensemble simulation, population
// fits, propagated sensitivities, and the empirical n-scaling sweep.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "zenometry/dynamics.hpp"
#include "zenometry/fitting.hpp"
#include "zenometry/metrology.hpp"

namespace zenometry {

// Largest slot spacing the grid may have before the n-qubit fringe aliases.
inline double nyquist_interval(int n, double system_freq) {
    return std::numbers::pi / (static_cast<double>(n) * system_freq);
}

inline bool grid_satisfies_nyquist(std::span<const double> times, int n, double system_freq) {
    const double limit = nyquist_interval(n, system_freq);
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i + 1] - times[i] < limit)) return false;
    return times.size() >= 2;
}

struct FringeSpectrum {
    std::vector<double> omega;  // rad/ms
    std::vector<double> power;  // |DFT of 1 - 2p|^2
};

// Discrete power spectrum of the fringe signal 1 - 2p on [~0, Nyquist].
inline FringeSpectrum fringe_spectrum(std::span<const double> times, std::span<const double> p,
                                      std::size_t points = 2048) {
    if (times.size() < 2 || times.size() != p.size())
        throw std::invalid_argument("fringe_spectrum: bad input sizes");
    std::vector<double> signal(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) signal[i] = 1.0 - 2.0 * p[i];
    double dt_min = times.back() - times.front();
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        dt_min = std::min(dt_min, times[i + 1] - times[i]);
    const double omega_max = std::numbers::pi / dt_min;
    FringeSpectrum spec;
    spec.omega.resize(points);
    spec.power.resize(points);
    for (std::size_t k = 0; k < points; ++k) {
        spec.omega[k] = omega_max * static_cast<double>(k + 1) / static_cast<double>(points);
        spec.power[k] = detail::dft_power(times, signal, spec.omega[k]);
    }
    return spec;
}

struct ExperimentPoint {
    int n = 1;
    FitResult fit_unentangled;
    FitResult fit_ghz;
    PropagatedSensitivity sens_unentangled;
    PropagatedSensitivity sens_ghz;
    double ratio = 0.0;  // r(n)
};

struct ExperimentOptions {
    double total_time = 10.0;  // T, ms
    SimulateOptions sim{};
    FitOptions fit{};
};

// One full measurement at fixed n: simulate both probes, fit the population
// model, and propagate the fitted coefficient to (t_opt, dw_min). The
// unentangled curve is the per-qubit average, so its fit uses the n = 1 form.
inline ExperimentPoint run_experiment_point(const NoiseModel& model, const EnsembleConfig& base,
                                            int n, double system_freq,
                                            std::span<const double> times,
                                            const ExperimentOptions& options = {}) {
    if (!grid_satisfies_nyquist(times, n, system_freq))
        throw std::invalid_argument("run_experiment_point: time grid below the Nyquist rate");
    EnsembleConfig config = base;
    config.qubit_count = n;

    ExperimentPoint point;
    point.n = n;

    const ProbeSpec product{ProbeKind::Unentangled, n, system_freq};
    const auto curve_u = simulate_ramsey(product, model, config, times, options.sim);
    point.fit_unentangled = fit_ramsey(curve_u.times, curve_u.p_mean, 1, options.fit);

    const ProbeSpec ghz{ProbeKind::Ghz, n, system_freq};
    const auto curve_e = simulate_ramsey(ghz, model, config, times, options.sim);
    point.fit_ghz = fit_ramsey(curve_e.times, curve_e.p_mean, n, options.fit);

    point.sens_unentangled =
        propagate_delta_omega(point.fit_unentangled, n, options.total_time, ProbeKind::Unentangled);
    point.sens_ghz = propagate_delta_omega(point.fit_ghz, n, options.total_time, ProbeKind::Ghz);
    point.ratio = point.sens_unentangled.delta_omega / point.sens_ghz.delta_omega;
    return point;
}

struct EmpiricalScalingReport {
    std::vector<ExperimentPoint> points;
    PowerLawFit ratio_vs_n;
    PowerLawFit delta_e_vs_n;
    PowerLawFit t_e_vs_n;
};

// Monte Carlo counterpart of sensitivity_sweep: the scaling exponents come
// from fitted coefficients rather than the analytic Gamma.
inline EmpiricalScalingReport empirical_scaling_sweep(const NoiseModel& model,
                                                      const EnsembleConfig& base,
                                                      std::span<const int> n_values,
                                                      double system_freq,
                                                      std::span<const double> times,
                                                      const ExperimentOptions& options = {}) {
    if (n_values.size() < 3)
        throw std::invalid_argument("empirical_scaling_sweep: need >= 3 n values");
    EmpiricalScalingReport report;
    for (int n : n_values)
        report.points.push_back(
            run_experiment_point(model, base, n, system_freq, times, options));
    std::vector<double> ns, ratios, dwe, te;
    for (const auto& pt : report.points) {
        ns.push_back(static_cast<double>(pt.n));
        ratios.push_back(pt.ratio);
        dwe.push_back(pt.sens_ghz.delta_omega);
        te.push_back(pt.sens_ghz.t_opt);
    }
    report.ratio_vs_n = fit_power_law(ns, ratios);
    report.delta_e_vs_n = fit_power_law(ns, dwe);
    report.t_e_vs_n = fit_power_law(ns, te);
    return report;
}

} // namespace zenometry
