// metrology.hpp — Sensitivity analytics: variance curves, optimal measurement
// times, Markovian/Zeno closed forms, and the n-scaling sweep.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "zenometry/errors.hpp"
#include "zenometry/fitting.hpp"
#include "zenometry/probe.hpp"
#include "zenometry/spectra.hpp"

namespace zenometry {

// Standard deviation of the estimated frequency after total time T with
// free-precession slots of length t:
//   unentangled: dw^2 = exp[2 Gamma(t)] / (n T t)
//   GHZ:         dw^2 = exp[2 n Gamma(t)] / (n^2 T t)
// t <= 0 is a divergent point and maps to +inf (excluded from minima).
template <DecoherenceSource M>
double delta_omega(const M& model, ProbeKind kind, int n, double total_time, double t) {
    if (n < 1) throw std::invalid_argument("delta_omega: n must be >= 1");
    if (!(total_time > 0.0)) throw std::invalid_argument("delta_omega: total time must be > 0");
    if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(n);
    const double gamma_total = model.decoherence_factor(t) * (kind == ProbeKind::Ghz ? nd : 1.0);
    const double denom = kind == ProbeKind::Ghz ? nd * nd * total_time * t : nd * total_time * t;
    return std::sqrt(std::exp(2.0 * gamma_total) / denom);
}

template <DecoherenceSource M>
std::vector<double> variance_curve(const M& model, ProbeKind kind, int n, double total_time,
                                   std::span<const double> times) {
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        out[i] = delta_omega(model, kind, n, total_time, times[i]);
    return out;
}

struct RootOptions {
    double scan_bound = 0.0;   // upper end of the (0, bound] search window, ms
    int scan_steps = 4096;
    double tolerance = 1e-6;   // ms
};

inline RootOptions default_root_options(const NoiseModel& model) {
    // gamma(t) is 2pi/w_b periodic; the working regime sits on the first
    // rising branch, so one period is the natural scan window.
    return RootOptions{2.0 * std::numbers::pi / model.base_freq(), 4096, 1e-6};
}

inline RootOptions default_root_options(const MarkovianRate& model) {
    return RootOptions{10.0 / model.rate, 4096, 1e-6};
}

inline RootOptions default_root_options(const QuadraticRate& model) {
    return RootOptions{10.0 / std::sqrt(4.0 * model.coefficient), 4096, 1e-6};
}

// Smallest positive root of 2 t gamma(t) = 1 (unentangled) or 2 n t gamma(t) = 1
// (GHZ), located by scan + bisection. This is the stationary point of
// ln dw^2(t), so it coincides with the variance-curve minimum.
template <DecoherenceSource M>
double optimal_time(const M& model, ProbeKind kind, int n, RootOptions options) {
    if (!(options.scan_bound > 0.0))
        throw std::invalid_argument("optimal_time: scan bound must be > 0");
    if (options.scan_steps < 2) throw std::invalid_argument("optimal_time: too few scan steps");
    const double mult = kind == ProbeKind::Ghz ? static_cast<double>(n) : 1.0;
    auto g = [&](double t) { return 2.0 * mult * t * model.decoherence_rate(t) - 1.0; };

    const double step = options.scan_bound / static_cast<double>(options.scan_steps);
    double lo = 0.0;  // g(0+) = -1
    double hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= options.scan_steps; ++i) {
        const double t = step * static_cast<double>(i);
        if (g(t) >= 0.0) {
            hi = t;
            lo = t - step;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw NoOptimumError(options.scan_bound);
    while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

enum class NoiseRegime { Markovian, Zeno };

struct ClosedFormLimits {
    double variance_unentangled = 0.0;  // (rad/ms)^2
    double variance_entangled = 0.0;
};

// Variance minima in the two tractable regimes:
//   Markovian, gamma = c:  dw^2 = 2 c e / (n T) for both probes
//   Zeno, gamma = 2 c t:   dw^2_u = 2 sqrt(c e) / (n T),
//                          dw^2_e = 2 sqrt(n c e) / (n^2 T)
inline ClosedFormLimits closed_form_limits(double c, NoiseRegime regime, int n, double total_time) {
    if (!(c > 0.0)) throw std::invalid_argument("closed_form_limits: c must be > 0");
    if (n < 1 || !(total_time > 0.0))
        throw std::invalid_argument("closed_form_limits: bad n or total time");
    const double nd = static_cast<double>(n);
    ClosedFormLimits out;
    if (regime == NoiseRegime::Markovian) {
        out.variance_unentangled = 2.0 * c * std::numbers::e / (nd * total_time);
        out.variance_entangled = out.variance_unentangled;
    } else {
        out.variance_unentangled = 2.0 * std::sqrt(c * std::numbers::e) / (nd * total_time);
        out.variance_entangled = 2.0 * std::sqrt(nd * c * std::numbers::e) / (nd * nd * total_time);
    }
    return out;
}

struct SensitivityPoint {
    int n = 1;
    ProbeKind kind = ProbeKind::Unentangled;
    double t_opt = 0.0;            // ms
    double delta_omega_min = 0.0;  // rad/ms
    double total_time = 0.0;       // ms
};

struct SweepOptions {
    double total_time = 10.0;
    RootOptions root{};
    // evaluation time used when no interior optimum exists (noiseless case);
    // unset means NoOptimum propagates
    std::optional<double> fixed_time{};
};

struct ScalingReport {
    std::vector<SensitivityPoint> unentangled;
    std::vector<SensitivityPoint> entangled;
    std::vector<double> ratios;  // r(n) = dw_u / dw_e
    PowerLawFit ratio_vs_n;
    PowerLawFit delta_e_vs_n;
    PowerLawFit t_e_vs_n;
};

// Analytic sweep: per n, optimal times from the root condition and minima from
// the variance formula, then log-log exponent fits over n.
template <DecoherenceSource M>
ScalingReport sensitivity_sweep(const M& model, std::span<const int> n_values,
                                SweepOptions options) {
    if (n_values.empty()) throw std::invalid_argument("sensitivity_sweep: empty n range");
    ScalingReport report;
    for (int n : n_values) {
        auto locate = [&](ProbeKind kind) {
            try {
                return optimal_time(model, kind, n, options.root);
            } catch (const NoOptimumError&) {
                if (options.fixed_time) return *options.fixed_time;
                throw;
            }
        };
        const double tu = locate(ProbeKind::Unentangled);
        const double te = locate(ProbeKind::Ghz);
        report.unentangled.push_back(
            {n, ProbeKind::Unentangled, tu,
             delta_omega(model, ProbeKind::Unentangled, n, options.total_time, tu),
             options.total_time});
        report.entangled.push_back(
            {n, ProbeKind::Ghz, te,
             delta_omega(model, ProbeKind::Ghz, n, options.total_time, te), options.total_time});
        report.ratios.push_back(report.unentangled.back().delta_omega_min /
                                report.entangled.back().delta_omega_min);
    }
    if (n_values.size() >= 3) {
        std::vector<double> ns(n_values.size()), dwe(n_values.size()), te(n_values.size());
        for (std::size_t i = 0; i < n_values.size(); ++i) {
            ns[i] = static_cast<double>(n_values[i]);
            dwe[i] = report.entangled[i].delta_omega_min;
            te[i] = report.entangled[i].t_opt;
        }
        report.ratio_vs_n = fit_power_law(ns, report.ratios);
        report.delta_e_vs_n = fit_power_law(ns, dwe);
        report.t_e_vs_n = fit_power_law(ns, te);
    } else {
        throw std::invalid_argument("sensitivity_sweep: need >= 3 n values for exponent fits");
    }
    return report;
}

} // namespace zenometry
