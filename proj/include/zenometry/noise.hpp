// noise.hpp — Monte Carlo layer: harmonic noise trajectories, exact and sliced
// phase integrals, and the empirical decoherence estimator.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "zenometry/rng.hpp"
#include "zenometry/spectra.hpp"
#include "zenometry/util.hpp"

namespace zenometry {

struct EnsembleConfig {
    int sample_count = 20;            // m
    int slice_count = 1000;           // S
    std::uint64_t master_seed = 12345;
    int qubit_count = 1;              // n
};

// One realization: beta(t) = sum_j a_j cos(w_j t + psi_j) with
// a_j = alpha_z * w_j * F(w_j) fixed by the model and psi_j ~ U[0, 2pi).
struct NoiseTrajectory {
    std::vector<double> omegas;      // w_j, rad/ms
    std::vector<double> amplitudes;  // a_j, rad/ms
    std::vector<double> phases;      // psi_j, rad
    std::vector<double> sin_phases;  // sin(psi_j), cached for the phase integral
};

struct SubstreamId {
    std::uint64_t master = 0;
    std::uint64_t sample = 0;
    std::uint64_t qubit = 0;
};

inline NoiseTrajectory sample_trajectory(const NoiseModel& model, SubstreamId id) {
    const int count = model.harmonic_count();
    NoiseTrajectory traj;
    traj.omegas.resize(static_cast<std::size_t>(count));
    traj.amplitudes.resize(static_cast<std::size_t>(count));
    traj.phases.resize(static_cast<std::size_t>(count));
    traj.sin_phases.resize(static_cast<std::size_t>(count));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int j = 1; j <= count; ++j) {
        const std::size_t k = static_cast<std::size_t>(j - 1);
        traj.omegas[k] = model.omega(j);
        traj.amplitudes[k] = model.alpha_z() * traj.omegas[k] * model.modulation(j);
        traj.phases[k] = two_pi * rng::draw_unit(id.master, id.sample, id.qubit, k);
        traj.sin_phases[k] = std::sin(traj.phases[k]);
    }
    return traj;
}

// beta(t) = sum_j a_j cos(w_j t + psi_j)
inline double beta_at(const NoiseTrajectory& traj, double t) {
    if (t < 0.0) throw std::domain_error("beta_at: t must be >= 0");
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.omegas.size(); ++k)
        acc += traj.amplitudes[k] * std::cos(traj.omegas[k] * t + traj.phases[k]);
    return acc;
}

// phi(t) = int_0^t beta = sum_j (a_j / w_j) [sin(w_j t + psi_j) - sin(psi_j)]
inline double accumulated_phase(const NoiseTrajectory& traj, double t) {
    if (t < 0.0) throw std::domain_error("accumulated_phase: t must be >= 0");
    double acc = 0.0;
    for (std::size_t k = 0; k < traj.omegas.size(); ++k)
        acc += traj.amplitudes[k] / traj.omegas[k] *
               (std::sin(traj.omegas[k] * t + traj.phases[k]) - traj.sin_phases[k]);
    return acc;
}

namespace detail {

inline bool is_uniform_grid(std::span<const double> times, double& dt) {
    if (times.size() < 3) {
        dt = times.size() == 2 ? times[1] - times[0] : 0.0;
        return times.size() == 2 ? dt > 0.0 : false;
    }
    dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) return false;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double expected = times.front() + dt * static_cast<double>(k);
        if (std::abs(times[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            return false;
    }
    return true;
}

} // namespace detail

// phi(t_k) for every time on the grid. Uniform grids use a per-harmonic
// phasor recurrence (one complex multiply per step instead of a sin call);
// arbitrary grids fall back to the closed form.
inline std::vector<double> accumulated_phase_series(const NoiseTrajectory& traj,
                                                    std::span<const double> times) {
    std::vector<double> out(times.size(), 0.0);
    if (times.empty()) return out;
    for (double t : times)
        if (t < 0.0) throw std::domain_error("accumulated_phase_series: t must be >= 0");
    double dt = 0.0;
    if (!detail::is_uniform_grid(times, dt)) {
        for (std::size_t k = 0; k < times.size(); ++k)
            out[k] = accumulated_phase(traj, times[k]);
        return out;
    }
    const double t0 = times.front();
    for (std::size_t j = 0; j < traj.omegas.size(); ++j) {
        const double w = traj.omegas[j];
        const double scale = traj.amplitudes[j] / w;
        const double base = scale * traj.sin_phases[j];
        std::complex<double> ph = std::polar(1.0, w * t0 + traj.phases[j]);
        const std::complex<double> step = std::polar(1.0, w * dt);
        for (std::size_t k = 0; k < times.size(); ++k) {
            out[k] += scale * ph.imag() - base;
            ph *= step;
        }
    }
    return out;
}

// Slice angles theta_k = [w0 + beta(t_mid_k)] * (t_total / S), midpoint rule.
inline std::vector<double> discretize(const NoiseTrajectory& traj, double omega0,
                                      double t_total, int slices) {
    if (slices < 1) throw std::domain_error("discretize: slice count must be >= 1");
    if (!(t_total > 0.0)) throw std::domain_error("discretize: t_total must be > 0");
    const double dt = t_total / static_cast<double>(slices);
    std::vector<double> theta(static_cast<std::size_t>(slices));
    for (int s = 0; s < slices; ++s)
        theta[static_cast<std::size_t>(s)] =
            (omega0 + beta_at(traj, (static_cast<double>(s) + 0.5) * dt)) * dt;
    return theta;
}

// Noise phase accumulated by S midpoint slices over [0, t]: the discretized
// counterpart of accumulated_phase (system rotation w0*t excluded).
inline double sliced_phase(const NoiseTrajectory& traj, double t, int slices) {
    if (slices < 1) throw std::domain_error("sliced_phase: slice count must be >= 1");
    if (t < 0.0) throw std::domain_error("sliced_phase: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double dt = t / static_cast<double>(slices);
    double acc = 0.0;
    for (std::size_t j = 0; j < traj.omegas.size(); ++j) {
        const double w = traj.omegas[j];
        std::complex<double> ph = std::polar(1.0, w * 0.5 * dt + traj.phases[j]);
        const std::complex<double> step = std::polar(1.0, w * dt);
        double series = 0.0;
        for (int s = 0; s < slices; ++s) {
            series += ph.real();
            ph *= step;
        }
        acc += traj.amplitudes[j] * series;
    }
    return acc * dt;
}

// ---------------------------------------------------------------------------
// Empirical decoherence factor
// ---------------------------------------------------------------------------

enum class PhaseMethod { Exact, Sliced };

struct DecoherenceEstimate {
    std::vector<double> times;
    std::vector<double> gamma_hat;  // -ln |<e^{i phi}>_m|; +inf where fully dephased
    std::vector<double> stderr_jackknife;
    bool saturated = false;         // any +inf entries
};

// Gamma_hat(t) = -ln |<e^{i phi_m(t)}>_m| with jackknife standard errors.
inline DecoherenceEstimate empirical_decoherence(const NoiseModel& model,
                                                 const EnsembleConfig& config,
                                                 std::span<const double> times,
                                                 PhaseMethod method = PhaseMethod::Exact,
                                                 int workers = 1) {
    if (times.empty()) throw std::invalid_argument("empirical_decoherence: empty time grid");
    for (double t : times)
        if (t < 0.0) throw std::domain_error("empirical_decoherence: t must be >= 0");
    if (config.sample_count < 1)
        throw std::invalid_argument("empirical_decoherence: sample_count must be >= 1");

    const std::size_t m = static_cast<std::size_t>(config.sample_count);
    const std::size_t nt = times.size();
    Matrix re(m, nt), im(m, nt);

    parallel_chunks(m, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto traj = sample_trajectory(model, {config.master_seed, i, 0});
            if (method == PhaseMethod::Exact) {
                const auto phi = accumulated_phase_series(traj, times);
                for (std::size_t k = 0; k < nt; ++k) {
                    re.at(i, k) = std::cos(phi[k]);
                    im.at(i, k) = std::sin(phi[k]);
                }
            } else {
                for (std::size_t k = 0; k < nt; ++k) {
                    const double phi = times[k] == 0.0
                                           ? 0.0
                                           : sliced_phase(traj, times[k], config.slice_count);
                    re.at(i, k) = std::cos(phi);
                    im.at(i, k) = std::sin(phi);
                }
            }
        }
    });

    DecoherenceEstimate est;
    est.times.assign(times.begin(), times.end());
    est.gamma_hat.resize(nt);
    est.stderr_jackknife.assign(nt, 0.0);
    const double md = static_cast<double>(m);
    std::vector<double> loo(m);
    for (std::size_t k = 0; k < nt; ++k) {
        double sr = 0.0, si = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            sr += re.at(i, k);
            si += im.at(i, k);
        }
        const double modulus = std::hypot(sr / md, si / md);
        if (modulus == 0.0) {
            est.gamma_hat[k] = std::numeric_limits<double>::infinity();
            est.saturated = true;
            continue;
        }
        est.gamma_hat[k] = -std::log(modulus);
        if (m < 2) continue;
        double mean_loo = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double lr = (sr - re.at(i, k)) / (md - 1.0);
            const double li = (si - im.at(i, k)) / (md - 1.0);
            const double mod = std::hypot(lr, li);
            loo[i] = mod > 0.0 ? -std::log(mod) : std::numeric_limits<double>::infinity();
            mean_loo += loo[i];
        }
        mean_loo /= md;
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = loo[i] - mean_loo;
            ss += d * d;
        }
        est.stderr_jackknife[k] = std::sqrt((md - 1.0) / md * ss);
    }
    return est;
}

} // namespace zenometry
