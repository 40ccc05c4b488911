// dynamics.hpp — Probe propagation under per-trajectory dephasing, Ramsey
// population curves, and the time-local master-equation cross-check.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zenometry/noise.hpp"
#include "zenometry/probe.hpp"
#include "zenometry/spectra.hpp"
#include "zenometry/util.hpp"

namespace zenometry {

// FNV-1a over the physically defining numbers; used to fingerprint outputs.
inline std::uint64_t model_hash(const NoiseModel& model) {
    std::uint64_t h = 1469598103934665603ULL;
    auto fold = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    fold(model.alpha_z());
    fold(model.base_freq());
    fold(static_cast<double>(model.harmonic_count()));
    fold(model.inverse_temp());
    fold(model.system_freq());
    for (double f : model.modulation_values()) fold(f);
    return h;
}

// Transition probability of one realization given the accumulated noise
// phases of the n qubits.
//   GHZ:          P = (1 - cos(n w0 t + sum_k phi_k)) / 2
//   Unentangled:  P = (1/n) sum_k (1 - cos(w0 t + phi_k)) / 2
inline double trajectory_population(const ProbeSpec& probe, std::span<const double> phases,
                                    double t) {
    if (static_cast<int>(phases.size()) != probe.qubit_count)
        throw std::invalid_argument("trajectory_population: phase list length != qubit count");
    if (probe.kind == ProbeKind::Ghz) {
        double total = probe.system_freq * static_cast<double>(probe.qubit_count) * t;
        for (double p : phases) total += p;
        return 0.5 * (1.0 - std::cos(total));
    }
    double acc = 0.0;
    for (double p : phases) acc += 0.5 * (1.0 - std::cos(probe.system_freq * t + p));
    return acc / static_cast<double>(probe.qubit_count);
}

struct RamseyCurve {
    std::vector<double> times;
    std::vector<double> p_mean;
    std::vector<double> p_stderr;
    Matrix p_samples;  // sample_count x times
    ProbeSpec probe;
    std::uint64_t model_fingerprint = 0;
    std::uint64_t master_seed = 0;
};

struct SimulateOptions {
    int workers = 1;
    int shot_noise_trials = 0;  // 0 disables projection noise
    PhaseMethod phase_method = PhaseMethod::Exact;
};

// Ensemble Ramsey curve with independent per-(sample, qubit) trajectories.
// Deterministic in (model, config): worker count only partitions the sample
// loop, and the reduction runs in fixed sample order.
inline RamseyCurve simulate_ramsey(const ProbeSpec& probe, const NoiseModel& model,
                                   const EnsembleConfig& config,
                                   std::span<const double> times,
                                   SimulateOptions options = {}) {
    if (times.empty()) throw std::invalid_argument("simulate_ramsey: empty time grid");
    if (probe.qubit_count < 1) throw std::invalid_argument("simulate_ramsey: qubit count must be >= 1");
    if (config.sample_count < 1)
        throw std::invalid_argument("simulate_ramsey: sample_count must be >= 1");
    for (double t : times)
        if (t < 0.0) throw std::domain_error("simulate_ramsey: t must be >= 0");

    const std::size_t m = static_cast<std::size_t>(config.sample_count);
    const std::size_t nt = times.size();
    const std::size_t nq = static_cast<std::size_t>(probe.qubit_count);

    RamseyCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.probe = probe;
    curve.model_fingerprint = model_hash(model);
    curve.master_seed = config.master_seed;
    curve.p_samples = Matrix(m, nt);

    parallel_chunks(m, options.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> phi_sum;      // GHZ: sum of per-qubit phases
        std::vector<double> pop;          // Unentangled: accumulated populations
        for (std::size_t i = begin; i < end; ++i) {
            if (probe.kind == ProbeKind::Ghz) {
                phi_sum.assign(nt, 0.0);
                for (std::size_t q = 0; q < nq; ++q) {
                    const auto traj = sample_trajectory(model, {config.master_seed, i, q});
                    if (options.phase_method == PhaseMethod::Exact) {
                        const auto phi = accumulated_phase_series(traj, times);
                        for (std::size_t k = 0; k < nt; ++k) phi_sum[k] += phi[k];
                    } else {
                        for (std::size_t k = 0; k < nt; ++k)
                            phi_sum[k] += times[k] == 0.0
                                              ? 0.0
                                              : sliced_phase(traj, times[k], config.slice_count);
                    }
                }
                const double rate = probe.system_freq * static_cast<double>(nq);
                for (std::size_t k = 0; k < nt; ++k)
                    curve.p_samples.at(i, k) = 0.5 * (1.0 - std::cos(rate * times[k] + phi_sum[k]));
            } else {
                pop.assign(nt, 0.0);
                for (std::size_t q = 0; q < nq; ++q) {
                    const auto traj = sample_trajectory(model, {config.master_seed, i, q});
                    std::vector<double> phi;
                    if (options.phase_method == PhaseMethod::Exact) {
                        phi = accumulated_phase_series(traj, times);
                    } else {
                        phi.resize(nt);
                        for (std::size_t k = 0; k < nt; ++k)
                            phi[k] = times[k] == 0.0
                                         ? 0.0
                                         : sliced_phase(traj, times[k], config.slice_count);
                    }
                    for (std::size_t k = 0; k < nt; ++k)
                        pop[k] += 0.5 * (1.0 - std::cos(probe.system_freq * times[k] + phi[k]));
                }
                for (std::size_t k = 0; k < nt; ++k)
                    curve.p_samples.at(i, k) = pop[k] / static_cast<double>(nq);
            }
            if (options.shot_noise_trials > 0) {
                const int trials = options.shot_noise_trials;
                for (std::size_t k = 0; k < nt; ++k) {
                    const double p = curve.p_samples.at(i, k);
                    int hits = 0;
                    for (int s = 0; s < trials; ++s)
                        if (rng::draw_unit(config.master_seed, rng::kShotNoiseStream | i, k,
                                           static_cast<std::uint64_t>(s)) < p)
                            ++hits;
                    curve.p_samples.at(i, k) = static_cast<double>(hits) / trials;
                }
            }
        }
    });

    curve.p_mean.resize(nt);
    curve.p_stderr.assign(nt, 0.0);
    const double md = static_cast<double>(m);
    for (std::size_t k = 0; k < nt; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += curve.p_samples.at(i, k);
        curve.p_mean[k] = s / md;
        if (m > 1) {
            double ss = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = curve.p_samples.at(i, k) - curve.p_mean[k];
                ss += d * d;
            }
            curve.p_stderr[k] = std::sqrt(ss / (md * (md - 1.0)));
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Master-equation cross-check
// ---------------------------------------------------------------------------

struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& what, double time, double step)
        : std::runtime_error(what + " (t=" + std::to_string(time) +
                             " ms, h=" + std::to_string(step) + " ms)"),
          at_time(time), step_size(step) {}
    double at_time;
    double step_size;
};

struct IntegratorOptions {
    double tolerance = 1e-10;  // local error bound per step
    double min_step = 1e-12;   // ms
    bool lindblad_factor_two = false;
};

struct CoherenceSeries {
    std::vector<double> times;
    std::vector<std::complex<double>> values;
    std::size_t steps = 0;
};

// Effective coherence equation dc/dt = [-i n w0 - n gamma_eff(t)] c, c(0) = 1,
// with gamma_eff = dGamma/dt (or twice that under the alternative Lindblad
// prefactor reading). Classic RK4 with step-doubling error control; the
// analytic solution is |c(t)| = e^{-n Gamma(t)}, arg c(t) = -n w0 t.
inline CoherenceSeries master_equation_coherence(const NoiseModel& model, int n,
                                                 std::span<const double> times,
                                                 IntegratorOptions options = {}) {
    if (times.empty()) throw std::invalid_argument("master_equation_coherence: empty time grid");
    if (n < 1) throw std::invalid_argument("master_equation_coherence: n must be >= 1");
    if (times.front() < 0.0)
        throw std::domain_error("master_equation_coherence: times must start >= 0");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1]))
            throw std::invalid_argument("master_equation_coherence: times must be ascending");

    const double nd = static_cast<double>(n);
    const double factor = options.lindblad_factor_two ? 2.0 : 1.0;
    const std::complex<double> drift(0.0, -nd * model.system_freq());
    auto rhs = [&](double t, std::complex<double> c) {
        return (drift - nd * factor * model.decoherence_rate(t)) * c;
    };
    auto rk4 = [&](double t, std::complex<double> c, double h) {
        const auto k1 = rhs(t, c);
        const auto k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1);
        const auto k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2);
        const auto k4 = rhs(t + h, c + h * k3);
        return c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    CoherenceSeries series;
    series.times.assign(times.begin(), times.end());
    series.values.reserve(times.size());

    std::complex<double> c(1.0, 0.0);
    double t = 0.0;
    double h = 0.05 / (nd * model.system_freq() + 1.0);
    for (double target : times) {
        while (t < target) {
            const double span = target - t;
            const double step = std::min(h, span);
            const auto full = rk4(t, c, step);
            const auto half = rk4(t + 0.5 * step, rk4(t, c, 0.5 * step), 0.5 * step);
            const double err = std::abs(full - half);
            if (err <= options.tolerance) {
                c = half + (half - full) / 15.0;  // 5th-order local extrapolation
                t += step;
                ++series.steps;
                const double grow = err > 0.0 ? 0.9 * std::pow(options.tolerance / err, 0.2) : 2.0;
                h = step * std::min(2.0, std::max(1.0, grow));
            } else {
                h = step * std::max(0.1, 0.9 * std::pow(options.tolerance / err, 0.2));
                if (h < options.min_step)
                    throw IntegrationError("master_equation_coherence: step-size underflow", t, h);
            }
        }
        series.values.push_back(c);
    }
    return series;
}

// ---------------------------------------------------------------------------
// Monte Carlo vs master-equation cross-validation
// ---------------------------------------------------------------------------

struct OracleReport {
    std::vector<double> times;
    std::vector<double> p_monte_carlo;
    std::vector<double> p_master_equation;
    double max_abs_deviation = 0.0;
    double mean_abs_deviation = 0.0;
};

// Compares the ensemble Ramsey curve against P(t) = [1 - Re c(t)] / 2 from the
// master-equation coherence. For unentangled probes the per-qubit (n = 1)
// coherence is the matching reference.
inline OracleReport oracle_check(const NoiseModel& model, const ProbeSpec& probe,
                                 const EnsembleConfig& config, std::span<const double> times,
                                 SimulateOptions sim_options = {},
                                 IntegratorOptions ode_options = {}) {
    OracleReport report;
    const auto curve = simulate_ramsey(probe, model, config, times, sim_options);
    const int ode_n = probe.kind == ProbeKind::Ghz ? probe.qubit_count : 1;
    const auto coh = master_equation_coherence(model, ode_n, times, ode_options);

    report.times.assign(times.begin(), times.end());
    report.p_monte_carlo = curve.p_mean;
    report.p_master_equation.resize(times.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        report.p_master_equation[k] = 0.5 * (1.0 - coh.values[k].real());
        const double dev = std::abs(report.p_monte_carlo[k] - report.p_master_equation[k]);
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        sum += dev;
    }
    report.mean_abs_deviation = sum / static_cast<double>(times.size());
    return report;
}

} // namespace zenometry
