// fitting.hpp — Nonlinear least squares for the Ramsey population model,
// power-law regression, and delta-method uncertainty propagation.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zenometry/errors.hpp"
#include "zenometry/probe.hpp"

namespace zenometry {

enum class GammaParameterization { Quadratic, Free };

struct FitOptions {
    GammaParameterization parameterization = GammaParameterization::Quadratic;
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double initial_damping = 1e-3;
    int free_gamma_nodes = 8;  // Free parameterization only
};

struct FitResult {
    double omega_hat = 0.0;             // rad/ms
    double c_hat = 0.0;                 // 1/ms^2 (quadratic-Gamma coefficient)
    std::vector<double> node_times;     // Free parameterization: node grid
    std::vector<double> gamma_nodes;    // Free parameterization: Gamma at nodes
    std::vector<double> covariance;     // k x k row-major, sigma^2 (J^T J)^-1
    double residual_rms = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> cost_history;   // accepted residual sums, monotone non-increasing
    std::uint64_t input_fingerprint = 0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_stderr = 0.0;
};

namespace detail {

// Cholesky solve of the SPD system A x = b; A and b are overwritten.
// Returns false when A is not positive definite.
inline bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = a[i * k + j];
            for (std::size_t p = 0; p < i; ++p) s -= a[i * k + p] * a[j * k + p];
            if (i == j) {
                if (!(s > 0.0)) return false;
                a[i * k + i] = std::sqrt(s);
            } else {
                a[j * k + i] = s / a[i * k + i];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (std::size_t p = 0; p < i; ++p) s -= a[i * k + p] * b[p];
        b[i] = s / a[i * k + i];
    }
    for (std::size_t ii = k; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t p = ii + 1; p < k; ++p) s -= a[p * k + ii] * b[p];
        b[ii] = s / a[ii * k + ii];
    }
    return true;
}

// Inverse of an SPD matrix by solving against unit vectors.
inline std::vector<double> spd_inverse(const std::vector<double>& a, std::size_t k) {
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> chol = a;
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        if (!cholesky_solve(chol, e, k))
            throw DegenerateFitError("fit covariance: normal matrix not positive definite");
        for (std::size_t row = 0; row < k; ++row) inv[row * k + col] = e[row];
    }
    return inv;
}

inline double dft_power(std::span<const double> times, std::span<const double> signal,
                        double omega) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < times.size(); ++i)
        acc += signal[i] * std::polar(1.0, -omega * times[i]);
    return std::norm(acc);
}

// Dominant fringe frequency of 1 - 2p: coarse DFT scan up to the Nyquist
// rate, then one golden-section refinement pass around the peak.
inline double fringe_frequency(std::span<const double> times, std::span<const double> p) {
    const std::size_t n = times.size();
    std::vector<double> signal(n);
    for (std::size_t i = 0; i < n; ++i) signal[i] = 1.0 - 2.0 * p[i];

    const double span = times.back() - times.front();
    double dt_min = span;
    for (std::size_t i = 0; i + 1 < n; ++i) dt_min = std::min(dt_min, times[i + 1] - times[i]);
    if (!(span > 0.0) || !(dt_min > 0.0))
        throw std::invalid_argument("fringe_frequency: degenerate time grid");

    const double resolution = 2.0 * std::numbers::pi / span;
    const double omega_max = std::numbers::pi / dt_min;
    const double step = resolution / 8.0;
    double best_omega = resolution / 2.0;
    double best_power = -1.0;
    for (double w = resolution / 2.0; w <= omega_max; w += step) {
        const double pw = dft_power(times, signal, w);
        if (pw > best_power) {
            best_power = pw;
            best_omega = w;
        }
    }
    // golden-section maximization on the bracketing interval
    constexpr double inv_phi = 0.6180339887498949;
    double lo = std::max(step / 2.0, best_omega - step);
    double hi = best_omega + step;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = dft_power(times, signal, x1);
    double f2 = dft_power(times, signal, x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = dft_power(times, signal, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = dft_power(times, signal, x2);
        }
    }
    return 0.5 * (lo + hi);
}

inline std::uint64_t fingerprint(std::span<const double> times, std::span<const double> p, int n) {
    std::uint64_t h = 1469598103934665603ULL;
    auto fold = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    fold(static_cast<double>(n));
    for (double t : times) fold(t);
    for (double v : p) fold(v);
    return h;
}

} // namespace detail

// Population model of a Ramsey fringe with quadratic decoherence:
// P(t) = [1 - cos(n w t) e^{-n c t^2}] / 2.
inline double ramsey_population_model(double t, int n, double omega, double c) {
    const double nd = static_cast<double>(n);
    return 0.5 * (1.0 - std::cos(nd * omega * t) * std::exp(-nd * c * t * t));
}

// Analytic gradient (dP/domega, dP/dc) of ramsey_population_model.
inline std::pair<double, double> ramsey_model_gradient(double t, int n, double omega, double c) {
    const double nd = static_cast<double>(n);
    const double envelope = std::exp(-nd * c * t * t);
    const double phase = nd * omega * t;
    return {0.5 * nd * t * std::sin(phase) * envelope,
            0.5 * nd * t * t * std::cos(phase) * envelope};
}

// Piecewise-linear Gamma through (0, 0) and (node_times[k], nodes[k]); flat
// extrapolation beyond the last node.
inline double interpolate_gamma_nodes(std::span<const double> node_times,
                                      std::span<const double> nodes, double t) {
    if (t <= 0.0) return 0.0;
    double prev_t = 0.0, prev_g = 0.0;
    for (std::size_t k = 0; k < node_times.size(); ++k) {
        if (t <= node_times[k]) {
            const double w = (t - prev_t) / (node_times[k] - prev_t);
            return prev_g + w * (nodes[k] - prev_g);
        }
        prev_t = node_times[k];
        prev_g = nodes[k];
    }
    return prev_g;
}

// Fits P(t) = [1 - cos(n w t) e^{-n Gamma(t)}] / 2 to (times, p_values) by
// damped Gauss-Newton with the analytic Jacobian. Quadratic parameterization
// fits (w, c) with Gamma = c t^2; Free fits (w, g_1..g_K) on a uniform node
// grid. Initial w comes from the dominant fringe of 1 - 2p, initial c from a
// log-envelope regression.
inline FitResult fit_ramsey(std::span<const double> times, std::span<const double> p_values,
                            int n, FitOptions options = {}) {
    const std::size_t npts = times.size();
    if (npts != p_values.size())
        throw std::invalid_argument("fit_ramsey: times and p_values size mismatch");
    if (npts < 8) throw std::invalid_argument("fit_ramsey: need at least 8 data points");
    if (n < 1) throw std::invalid_argument("fit_ramsey: n must be >= 1");
    for (double v : p_values)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("fit_ramsey: probabilities must lie in [0, 1]");

    const double fringe = detail::fringe_frequency(times, p_values);
    const double span = times.back() - times.front();
    if (span * fringe < 2.0 * std::numbers::pi)
        throw std::invalid_argument("fit_ramsey: data span less than one fringe period");

    const double nd = static_cast<double>(n);

    // envelope regression for the initial quadratic coefficient
    double c_init = 0.0;
    {
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            const double cosv = std::cos(fringe * times[i]);
            if (std::abs(cosv) < 0.5 || !(times[i] > 0.0)) continue;
            const double env = std::clamp(std::abs(1.0 - 2.0 * p_values[i]) / std::abs(cosv),
                                          1e-8, 1.0);
            const double x = times[i] * times[i];
            sxx += x * x;
            sxy += x * std::log(env);
        }
        if (sxx > 0.0) c_init = std::max(0.0, -sxy / sxx / nd);
    }

    const bool quadratic = options.parameterization == GammaParameterization::Quadratic;
    const int knodes = quadratic ? 0 : std::max(2, options.free_gamma_nodes);
    const std::size_t kparams = quadratic ? 2 : 1 + static_cast<std::size_t>(knodes);
    if (npts <= kparams) throw std::invalid_argument("fit_ramsey: more parameters than points");

    std::vector<double> node_times;
    std::vector<double> theta(kparams, 0.0);
    theta[0] = fringe / nd;
    if (quadratic) {
        theta[1] = c_init;
    } else {
        node_times.resize(static_cast<std::size_t>(knodes));
        for (int k = 1; k <= knodes; ++k) {
            const double tk = times.back() * static_cast<double>(k) / knodes;
            node_times[static_cast<std::size_t>(k - 1)] = tk;
            theta[static_cast<std::size_t>(k)] = c_init * tk * tk;
        }
    }

    auto gamma_of = [&](const std::vector<double>& th, double t) {
        return quadratic ? th[1] * t * t
                         : interpolate_gamma_nodes(node_times, std::span(th).subspan(1), t);
    };
    // residual r_i = p_i - M(t_i); J has dM/dtheta
    auto assemble = [&](const std::vector<double>& th, std::vector<double>& residual,
                        std::vector<double>& jac) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            const double t = times[i];
            double model, envelope, phase;
            if (quadratic) {
                model = ramsey_population_model(t, n, th[0], th[1]);
                envelope = std::exp(-nd * th[1] * t * t);
                phase = nd * th[0] * t;
            } else {
                envelope = std::exp(-nd * gamma_of(th, t));
                phase = nd * th[0] * t;
                model = 0.5 * (1.0 - std::cos(phase) * envelope);
            }
            residual[i] = p_values[i] - model;
            ssr += residual[i] * residual[i];
            if (jac.empty()) continue;
            if (quadratic) {
                const auto grad = ramsey_model_gradient(t, n, th[0], th[1]);
                jac[i * kparams + 0] = grad.first;
                jac[i * kparams + 1] = grad.second;
            } else {
                jac[i * kparams + 0] = 0.5 * nd * t * std::sin(phase) * envelope;
                // hat-function weights of the node grid
                double prev_t = 0.0;
                for (std::size_t k = 0; k < node_times.size(); ++k) {
                    double w = 0.0;
                    if (t > prev_t && t <= node_times[k]) {
                        w = (t - prev_t) / (node_times[k] - prev_t);
                    } else if (k + 1 < node_times.size() && t > node_times[k] &&
                               t <= node_times[k + 1]) {
                        w = (node_times[k + 1] - t) / (node_times[k + 1] - node_times[k]);
                    } else if (k + 1 == node_times.size() && t > node_times[k]) {
                        w = 1.0;  // flat extrapolation
                    }
                    jac[i * kparams + 1 + k] = 0.5 * nd * w * std::cos(phase) * envelope;
                    prev_t = node_times[k];
                }
            }
        }
        return ssr;
    };

    FitResult result;
    result.input_fingerprint = detail::fingerprint(times, p_values, n);
    result.node_times = node_times;

    std::vector<double> residual(npts), jac(npts * kparams);
    std::vector<double> none;
    double cost = assemble(theta, residual, jac);
    result.cost_history.push_back(cost);

    double damping = options.initial_damping;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        // gradient g = J^T r and normal matrix A = J^T J
        std::vector<double> g(kparams, 0.0), a(kparams * kparams, 0.0);
        for (std::size_t i = 0; i < npts; ++i)
            for (std::size_t row = 0; row < kparams; ++row) {
                g[row] += jac[i * kparams + row] * residual[i];
                for (std::size_t col = row; col < kparams; ++col)
                    a[row * kparams + col] += jac[i * kparams + row] * jac[i * kparams + col];
            }
        for (std::size_t row = 0; row < kparams; ++row)
            for (std::size_t col = 0; col < row; ++col)
                a[row * kparams + col] = a[col * kparams + row];

        double gnorm = 0.0, amax = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::abs(v));
        for (std::size_t d = 0; d < kparams; ++d) amax = std::max(amax, a[d * kparams + d]);
        if (!(amax > 0.0)) throw DegenerateFitError("fit_ramsey: rank-deficient Jacobian");
        for (std::size_t d = 0; d < kparams; ++d)
            if (a[d * kparams + d] < 1e-14 * amax)
                throw DegenerateFitError("fit_ramsey: rank-deficient Jacobian");
        // the gradient cannot drop below the rounding floor of the cost itself
        const double machine_floor =
            10.0 * std::sqrt(std::numeric_limits<double>::epsilon() * std::max(cost, 1e-300) * amax);
        if (gnorm < std::max(options.gradient_tolerance, machine_floor)) {
            result.converged = true;
            break;
        }

        bool accepted = false;
        while (damping < 1e14) {
            std::vector<double> lhs = a;
            for (std::size_t d = 0; d < kparams; ++d) lhs[d * kparams + d] += damping;
            std::vector<double> delta = g;
            if (!detail::cholesky_solve(lhs, delta, kparams)) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> trial = theta;
            for (std::size_t d = 0; d < kparams; ++d) trial[d] += delta[d];
            std::vector<double> trial_residual(npts);
            const double trial_cost = assemble(trial, trial_residual, none);
            if (trial_cost <= cost) {
                theta = std::move(trial);
                cost = trial_cost;
                result.cost_history.push_back(cost);
                damping = std::max(damping / 10.0, 1e-15);
                accepted = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) break;  // stalled: damping exhausted
        cost = assemble(theta, residual, jac);
    }
    result.iterations = iter;
    if (!result.converged) {
        // re-check the gradient in case the loop exhausted iterations (or
        // stalled on rounding) right at the optimum
        std::vector<double> g(kparams, 0.0);
        double amax = 0.0;
        for (std::size_t i = 0; i < npts; ++i)
            for (std::size_t row = 0; row < kparams; ++row) {
                g[row] += jac[i * kparams + row] * residual[i];
                amax = std::max(amax, jac[i * kparams + row] * jac[i * kparams + row]);
            }
        amax *= static_cast<double>(npts);
        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::abs(v));
        const double machine_floor =
            10.0 * std::sqrt(std::numeric_limits<double>::epsilon() * std::max(cost, 1e-300) * amax);
        result.converged = gnorm < std::max(options.gradient_tolerance, machine_floor);
    }

    result.omega_hat = theta[0];
    if (quadratic) {
        result.c_hat = theta[1];
    } else {
        result.gamma_nodes.assign(theta.begin() + 1, theta.end());
        // least-squares quadratic coefficient equivalent of the node values
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < node_times.size(); ++k) {
            const double t2 = node_times[k] * node_times[k];
            num += result.gamma_nodes[k] * t2;
            den += t2 * t2;
        }
        result.c_hat = den > 0.0 ? num / den : 0.0;
    }
    result.residual_rms = std::sqrt(cost / static_cast<double>(npts));

    // covariance = sigma^2 (J^T J)^-1 with the reduced residual variance
    std::vector<double> a(kparams * kparams, 0.0);
    for (std::size_t i = 0; i < npts; ++i)
        for (std::size_t row = 0; row < kparams; ++row)
            for (std::size_t col = 0; col < kparams; ++col)
                a[row * kparams + col] += jac[i * kparams + row] * jac[i * kparams + col];
    const double sigma2 = cost / static_cast<double>(npts - kparams);
    result.covariance = detail::spd_inverse(a, kparams);
    for (double& v : result.covariance) v *= sigma2;
    return result;
}

// Ordinary least squares on (ln x, ln y): y = prefactor * x^exponent.
inline PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (x.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::domain_error("fit_power_law: inputs must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::domain_error("fit_power_law: x values are all equal");
    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
        rss += r * r;
    }
    fit.exponent_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return fit;
}

struct PropagatedSensitivity {
    double t_opt = 0.0;
    double t_opt_stderr = 0.0;
    double delta_omega = 0.0;
    double delta_omega_stderr = 0.0;
};

// Optimal time and minimum standard deviation from a fitted quadratic-Gamma
// coefficient, with first-order (delta method) uncertainty propagation:
//   unentangled: t = (4c)^{-1/2},  dw^2 = 2 sqrt(c e) / (n T)
//   GHZ:         t = (4nc)^{-1/2}, dw^2 = 2 sqrt(n c e) / (n^2 T)
inline PropagatedSensitivity propagate_delta_omega(const FitResult& fit, int n, double T,
                                                   ProbeKind kind) {
    if (!fit.converged) throw std::invalid_argument("propagate_delta_omega: fit not converged");
    if (!(fit.c_hat > 0.0)) throw NoOptimumError(0.0);
    if (!(T > 0.0) || n < 1) throw std::invalid_argument("propagate_delta_omega: bad n or T");
    const double c = fit.c_hat;
    const double nd = static_cast<double>(n);
    // variance of the quadratic coefficient; parameter order is omega, then
    // c (quadratic) or the gamma nodes (free), where c_hat is the projection
    // sum_k w_k g_k with w_k = t_k^2 / sum t^4
    const std::size_t k = fit.node_times.empty() ? 2 : 1 + fit.node_times.size();
    double var_c = 0.0;
    if (fit.covariance.size() >= k * k) {
        if (fit.node_times.empty()) {
            var_c = fit.covariance[k + 1];
        } else {
            double den = 0.0;
            for (double tk : fit.node_times) den += tk * tk * tk * tk;
            for (std::size_t a = 0; a < fit.node_times.size(); ++a)
                for (std::size_t b = 0; b < fit.node_times.size(); ++b) {
                    const double wa = fit.node_times[a] * fit.node_times[a] / den;
                    const double wb = fit.node_times[b] * fit.node_times[b] / den;
                    var_c += wa * wb * fit.covariance[(a + 1) * k + (b + 1)];
                }
        }
    }
    const double sigma_c = var_c > 0.0 ? std::sqrt(var_c) : 0.0;

    PropagatedSensitivity out;
    const double scale = kind == ProbeKind::Ghz ? nd : 1.0;
    out.t_opt = 1.0 / std::sqrt(4.0 * scale * c);
    out.t_opt_stderr = out.t_opt * sigma_c / (2.0 * c);
    const double var =
        kind == ProbeKind::Ghz ? 2.0 * std::sqrt(nd * c * std::numbers::e) / (nd * nd * T)
                               : 2.0 * std::sqrt(c * std::numbers::e) / (nd * T);
    out.delta_omega = std::sqrt(var);
    out.delta_omega_stderr = out.delta_omega * sigma_c / (4.0 * c);
    return out;
}

} // namespace zenometry
