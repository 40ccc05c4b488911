// spectra.hpp — Spectral densities, the modulation function, and closed-form
// decoherence factor / rate for engineered dephasing noise.
//
// Units throughout: time in ms, angular frequency in rad/ms.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace zenometry {

// coth(x) for x > 0, expm1-stable; clamped to 1 for x > 20 where the
// correction is below double precision anyway.
inline double coth(double x) {
    if (!(x > 0.0)) throw std::domain_error("coth: argument must be positive");
    if (x > 20.0) return 1.0;
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Spectral density J(omega)
// ---------------------------------------------------------------------------

// J(w) = 2*lambda*gamma*w / (w^2 + gamma^2)
struct DrudeLorentz {
    double reorg_energy = 1.0;  // lambda, rad/ms
    double relax_rate = 1.0;    // gamma, rad/ms
};

// Termwise sum of Drude-Lorentz contributions.
struct LorentzianSum {
    std::vector<DrudeLorentz> terms;
};

// Sampled (omega, J) pairs with linear interpolation; queries outside the
// table range are range errors.
struct Tabulated {
    std::vector<double> omega;
    std::vector<double> value;
};

class SpectralDensity {
public:
    SpectralDensity() : form_(DrudeLorentz{}) {}

    SpectralDensity(DrudeLorentz d) : form_(d) { validate(d); }

    SpectralDensity(LorentzianSum s) : form_(std::move(s)) {
        const auto& sum = std::get<LorentzianSum>(form_);
        if (sum.terms.empty()) throw std::invalid_argument("LorentzianSum: no terms");
        for (const auto& t : sum.terms) validate(t);
    }

    SpectralDensity(Tabulated t) : form_(std::move(t)) {
        const auto& tab = std::get<Tabulated>(form_);
        if (tab.omega.size() < 2 || tab.omega.size() != tab.value.size())
            throw std::invalid_argument("Tabulated: need >= 2 matching (omega, J) pairs");
        for (std::size_t i = 0; i + 1 < tab.omega.size(); ++i)
            if (!(tab.omega[i] < tab.omega[i + 1]))
                throw std::invalid_argument("Tabulated: omega grid must be strictly ascending");
        for (double v : tab.value)
            if (v < 0.0) throw std::invalid_argument("Tabulated: J(omega) must be non-negative");
    }

    // evaluate_density: J(omega); omega < 0 is a domain error.
    double evaluate(double omega) const {
        if (omega < 0.0) throw std::domain_error("SpectralDensity: omega must be >= 0");
        if (const auto* d = std::get_if<DrudeLorentz>(&form_)) return drude(*d, omega);
        if (const auto* s = std::get_if<LorentzianSum>(&form_)) {
            double acc = 0.0;
            for (const auto& t : s->terms) acc += drude(t, omega);
            return acc;
        }
        const auto& tab = std::get<Tabulated>(form_);
        if (omega < tab.omega.front() || omega > tab.omega.back())
            throw std::out_of_range("SpectralDensity: omega outside tabulated range");
        const auto it = std::lower_bound(tab.omega.begin(), tab.omega.end(), omega);
        const std::size_t hi = std::min<std::size_t>(
            std::max<std::size_t>(1, static_cast<std::size_t>(it - tab.omega.begin())),
            tab.omega.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = (omega - tab.omega[lo]) / (tab.omega[hi] - tab.omega[lo]);
        return tab.value[lo] + w * (tab.value[hi] - tab.value[lo]);
    }

    const std::variant<DrudeLorentz, LorentzianSum, Tabulated>& form() const { return form_; }

private:
    static void validate(const DrudeLorentz& d) {
        if (!(d.reorg_energy > 0.0)) throw std::invalid_argument("DrudeLorentz: lambda must be > 0");
        if (!(d.relax_rate > 0.0)) throw std::invalid_argument("DrudeLorentz: gamma must be > 0");
    }
    static double drude(const DrudeLorentz& d, double omega) {
        return 2.0 * d.reorg_energy * d.relax_rate * omega /
               (omega * omega + d.relax_rate * d.relax_rate);
    }

    std::variant<DrudeLorentz, LorentzianSum, Tabulated> form_;
};

inline double evaluate_density(const SpectralDensity& density, double omega) {
    return density.evaluate(omega);
}

// ---------------------------------------------------------------------------
// Noise model: discretized modulation spec on the harmonic grid w_j = j*w_b
// ---------------------------------------------------------------------------

struct NoiseModelParams {
    SpectralDensity density{};
    double alpha_z = 1.0;       // dimensionless noise amplitude
    double base_freq = 0.02;    // w_b, rad/ms
    int harmonic_count = 50;    // J
    double inverse_temp = 1.0;  // beta, ms
    double system_freq = 10.0;  // w_0, rad/ms
};

class NoiseModel {
public:
    explicit NoiseModel(NoiseModelParams p) : p_(std::move(p)) {
        if (!(p_.base_freq > 0.0)) throw std::invalid_argument("NoiseModel: base_freq must be > 0");
        if (p_.harmonic_count < 1) throw std::invalid_argument("NoiseModel: harmonic_count must be >= 1");
        if (!(p_.inverse_temp > 0.0)) throw std::invalid_argument("NoiseModel: inverse_temp must be > 0");
        if (!(p_.system_freq > 0.0)) throw std::invalid_argument("NoiseModel: system_freq must be > 0");
        if (p_.alpha_z < 0.0) throw std::invalid_argument("NoiseModel: alpha_z must be >= 0");
        f_.resize(static_cast<std::size_t>(p_.harmonic_count));
        for (int j = 1; j <= p_.harmonic_count; ++j) {
            const double w = omega(j);
            // F(w)^2 = w0 * J(w) * coth(beta*w) / (2 w^2); for Drude-Lorentz this
            // is exactly lambda*gamma*w0*coth(beta*w)/(w^3 + gamma^2 w).
            const double under = p_.system_freq * p_.density.evaluate(w) *
                                 coth(p_.inverse_temp * w) / (2.0 * w * w);
            if (!(under > 0.0) || !std::isfinite(under))
                throw std::invalid_argument("NoiseModel: modulation function undefined at harmonic " +
                                            std::to_string(j));
            f_[static_cast<std::size_t>(j - 1)] = std::sqrt(under);
        }
    }

    double omega(int j) const {
        check_index(j);
        return static_cast<double>(j) * p_.base_freq;
    }

    // F(w_j), 1-based index.
    double modulation(int j) const {
        check_index(j);
        return f_[static_cast<std::size_t>(j - 1)];
    }

    // Gamma(t) = alpha^2 sum_j F(w_j)^2 sin^2(w_j t / 2)
    double decoherence_factor(double t) const {
        if (t < 0.0) throw std::domain_error("decoherence_factor: t must be >= 0");
        const double a2 = p_.alpha_z * p_.alpha_z;
        double acc = 0.0;
        for (int j = 1; j <= p_.harmonic_count; ++j) {
            const double s = std::sin(0.5 * omega(j) * t);
            acc += f_[static_cast<std::size_t>(j - 1)] * f_[static_cast<std::size_t>(j - 1)] * s * s;
        }
        return a2 * acc;
    }

    // gamma(t) = (alpha^2 / 2) sum_j w_j F(w_j)^2 sin(w_j t); equals dGamma/dt.
    double decoherence_rate(double t) const {
        if (t < 0.0) throw std::domain_error("decoherence_rate: t must be >= 0");
        const double a2 = p_.alpha_z * p_.alpha_z;
        double acc = 0.0;
        for (int j = 1; j <= p_.harmonic_count; ++j) {
            const double w = omega(j);
            const double f = f_[static_cast<std::size_t>(j - 1)];
            acc += w * f * f * std::sin(w * t);
        }
        return 0.5 * a2 * acc;
    }

    // Exact coefficient of the t^2 leading term of Gamma(t):
    // c = (alpha^2 / 4) sum_j F(w_j)^2 w_j^2.
    double quadratic_coefficient() const {
        const double a2 = p_.alpha_z * p_.alpha_z;
        double acc = 0.0;
        for (int j = 1; j <= p_.harmonic_count; ++j) {
            const double w = omega(j);
            const double f = f_[static_cast<std::size_t>(j - 1)];
            acc += f * f * w * w;
        }
        return 0.25 * a2 * acc;
    }

    // Copy with alpha_z rescaled so quadratic_coefficient() == target_c.
    NoiseModel calibrated(double target_c) const {
        if (!(target_c > 0.0)) throw std::invalid_argument("calibrated: target_c must be > 0");
        const double c = quadratic_coefficient();
        if (!(c > 0.0)) throw CalibrationError("calibrated: quadratic coefficient is zero");
        NoiseModelParams q = p_;
        q.alpha_z = p_.alpha_z * std::sqrt(target_c / c);
        return NoiseModel(q);
    }

    double alpha_z() const { return p_.alpha_z; }
    double base_freq() const { return p_.base_freq; }
    int harmonic_count() const { return p_.harmonic_count; }
    double inverse_temp() const { return p_.inverse_temp; }
    double system_freq() const { return p_.system_freq; }
    const SpectralDensity& density() const { return p_.density; }
    std::span<const double> modulation_values() const { return f_; }

private:
    void check_index(int j) const {
        if (j < 1 || j > p_.harmonic_count)
            throw std::out_of_range("NoiseModel: harmonic index out of range");
    }

    NoiseModelParams p_;
    std::vector<double> f_;  // F(w_j), j = 1..J
};

inline double modulation_function(const NoiseModel& m, int j) { return m.modulation(j); }
inline double decoherence_factor(const NoiseModel& m, double t) { return m.decoherence_factor(t); }
inline double decoherence_rate(const NoiseModel& m, double t) { return m.decoherence_rate(t); }
inline double quadratic_coefficient(const NoiseModel& m) { return m.quadratic_coefficient(); }
inline NoiseModel calibrate_amplitude(const NoiseModel& m, double target_c) {
    return m.calibrated(target_c);
}

// ---------------------------------------------------------------------------
// Analytic rate substitutes for the metrology layer
// ---------------------------------------------------------------------------

// Time-independent decay rate gamma(t) = c: exponential coherence decay.
struct MarkovianRate {
    double rate = 0.370;  // 1/ms
    double decoherence_factor(double t) const { return rate * t; }
    double decoherence_rate(double /*t*/) const { return rate; }
};

// Short-time law gamma(t) = 2ct, Gamma(t) = c t^2.
struct QuadraticRate {
    double coefficient = 0.370;  // 1/ms^2
    double decoherence_factor(double t) const { return coefficient * t * t; }
    double decoherence_rate(double t) const { return 2.0 * coefficient * t; }
};

template <class M>
concept DecoherenceSource = requires(const M& m, double t) {
    { m.decoherence_factor(t) } -> std::convertible_to<double>;
    { m.decoherence_rate(t) } -> std::convertible_to<double>;
};

// Default regime: Drude-Lorentz bath with the harmonic cutoff J*w_b = 1 rad/ms
// so the quadratic (Zeno) window covers the millisecond measurement scale,
// amplitude calibrated to c = 0.370 ms^-2.
inline constexpr double kDefaultQuadraticCoefficient = 0.370;  // ms^-2

inline NoiseModel default_noise_model() {
    NoiseModelParams p;
    p.density = SpectralDensity(DrudeLorentz{1.0, 1.0});
    p.base_freq = 0.02;
    p.harmonic_count = 50;
    p.inverse_temp = 1.0;
    p.system_freq = 10.0;
    p.alpha_z = 1.0;
    return NoiseModel(p).calibrated(kDefaultQuadraticCoefficient);
}

} // namespace zenometry
