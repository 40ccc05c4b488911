#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "zenometry/metrology.hpp"
#include "zenometry/util.hpp"

using namespace zenometry;

namespace {

NoiseModel noiseless_model() {
    NoiseModelParams p;
    p.alpha_z = 0.0;
    return NoiseModel(p);
}

const std::vector<int> kSweepRange{2, 3, 4, 5, 6, 7};

} // namespace

TEST_SUITE("metrology") {

TEST_CASE("noiseless variance curve is monotone with no interior optimum") {
    const auto m = noiseless_model();
    const auto grid = linspace(0.05, 5.0, 200);
    const auto curve = variance_curve(m, ProbeKind::Ghz, 7, 10.0, grid);
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) CHECK(curve[k] > curve[k + 1]);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(curve[k] == doctest::Approx(1.0 / (7.0 * std::sqrt(10.0 * grid[k]))));
    CHECK_THROWS_AS(optimal_time(m, ProbeKind::Ghz, 7, default_root_options(m)), NoOptimumError);
}

TEST_CASE("t = 0 maps to a divergent (infinite) point") {
    const QuadraticRate q{0.370};
    const std::vector<double> grid{0.0, 0.5};
    const auto curve = variance_curve(q, ProbeKind::Unentangled, 1, 10.0, grid);
    CHECK(std::isinf(curve[0]));
    CHECK(std::isfinite(curve[1]));
}

TEST_CASE("quadratic law: minima match the closed forms") {
    const QuadraticRate q{0.370};
    const auto grid = linspace(1e-4, 2.0, 10000);

    const auto curve_u = variance_curve(q, ProbeKind::Unentangled, 7, 10.0, grid);
    std::size_t argmin_u = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (curve_u[k] < curve_u[argmin_u]) argmin_u = k;
    CHECK(grid[argmin_u] == doctest::Approx(1.0 / std::sqrt(4.0 * 0.370)).epsilon(1e-3));
    CHECK(curve_u[argmin_u] == doctest::Approx(0.169274).epsilon(1e-3));

    const auto curve_e = variance_curve(q, ProbeKind::Ghz, 7, 10.0, grid);
    std::size_t argmin_e = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (curve_e[k] < curve_e[argmin_e]) argmin_e = k;
    CHECK(grid[argmin_e] == doctest::Approx(1.0 / std::sqrt(4.0 * 7.0 * 0.370)).epsilon(1e-3));
    CHECK(curve_e[argmin_e] == doctest::Approx(0.104068).epsilon(1e-3));
}

TEST_CASE("optimal time solves the stationarity condition exactly for known rates") {
    const QuadraticRate q{0.370};
    const auto opts = default_root_options(q);
    CHECK(optimal_time(q, ProbeKind::Unentangled, 1, opts) ==
          doctest::Approx(0.821995).epsilon(1e-4));
    CHECK(optimal_time(q, ProbeKind::Ghz, 7, opts) == doctest::Approx(0.310685).epsilon(1e-4));

    const MarkovianRate mk{0.370};
    const auto mopts = default_root_options(mk);
    CHECK(optimal_time(mk, ProbeKind::Unentangled, 5, mopts) ==
          doctest::Approx(1.0 / (2.0 * 0.370)).epsilon(1e-5));
    CHECK(optimal_time(mk, ProbeKind::Ghz, 5, mopts) ==
          doctest::Approx(1.0 / (2.0 * 5.0 * 0.370)).epsilon(1e-5));
}

TEST_CASE("optimal time agrees with a 10^4-point grid argmin for the default model") {
    const auto m = default_noise_model();
    const auto grid = linspace(1e-4, 2.0, 10000);
    const double step = grid[1] - grid[0];
    for (int n = 1; n <= 7; ++n) {
        for (ProbeKind kind : {ProbeKind::Unentangled, ProbeKind::Ghz}) {
            const double root = optimal_time(m, kind, n, default_root_options(m));
            const auto curve = variance_curve(m, kind, n, 10.0, grid);
            std::size_t argmin = 0;
            for (std::size_t k = 1; k < grid.size(); ++k)
                if (curve[k] < curve[argmin]) argmin = k;
            CHECK(std::abs(grid[argmin] - root) <= step + 1e-12);
        }
    }
}

TEST_CASE("log-variance derivative vanishes at the returned optimum") {
    const auto m = default_noise_model();
    const double h = 1e-5;
    for (int n : {1, 4, 7}) {
        for (ProbeKind kind : {ProbeKind::Unentangled, ProbeKind::Ghz}) {
            const double t = optimal_time(m, kind, n, default_root_options(m));
            const double up = delta_omega(m, kind, n, 10.0, t + h);
            const double dn = delta_omega(m, kind, n, 10.0, t - h);
            const double fd = (std::log(up * up) - std::log(dn * dn)) / (2.0 * h);
            // scale against 1/t, the size of the two competing terms
            CHECK(std::abs(fd) * t < 1e-3);
        }
    }
}

TEST_CASE("closed-form limits: Markovian probes tie, Zeno favors entanglement") {
    for (int n : {1, 3, 7}) {
        const auto mk = closed_form_limits(0.370, NoiseRegime::Markovian, n, 10.0);
        CHECK(mk.variance_unentangled == doctest::Approx(mk.variance_entangled));
        CHECK(mk.variance_unentangled ==
              doctest::Approx(2.0 * 0.370 * std::numbers::e / (n * 10.0)));
    }
    for (int n : {2, 5, 7}) {
        const auto qz = closed_form_limits(0.370, NoiseRegime::Zeno, n, 10.0);
        const double r = std::sqrt(qz.variance_unentangled / qz.variance_entangled);
        CHECK(r == doctest::Approx(std::pow(n, 0.25)).epsilon(1e-12));
    }
    const auto degenerate = closed_form_limits(1.0, NoiseRegime::Zeno, 1, 1.0);
    CHECK(degenerate.variance_unentangled == doctest::Approx(2.0 * std::sqrt(std::numbers::e)));
    CHECK(degenerate.variance_entangled == doctest::Approx(2.0 * std::sqrt(std::numbers::e)));
}

TEST_CASE("analytic sweep recovers the Zeno exponents") {
    const auto m = default_noise_model();
    SweepOptions opts;
    opts.root = default_root_options(m);
    const auto report = sensitivity_sweep(m, kSweepRange, opts);
    CHECK(report.ratio_vs_n.exponent == doctest::Approx(0.25).epsilon(0.12));
    CHECK(std::abs(report.ratio_vs_n.exponent - 0.25) < 0.03);
    CHECK(std::abs(report.delta_e_vs_n.exponent + 0.75) < 0.03);
    CHECK(report.t_e_vs_n.exponent == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("noiseless sweep at fixed time reaches the Heisenberg exponents") {
    const auto m = noiseless_model();
    SweepOptions opts;
    opts.root = default_root_options(m);
    opts.fixed_time = 0.822;  // colored-noise t_u of the same configuration
    const auto report = sensitivity_sweep(m, kSweepRange, opts);
    CHECK(std::abs(report.ratio_vs_n.exponent - 0.5) < 0.02);
    CHECK(std::abs(report.delta_e_vs_n.exponent + 1.0) < 0.02);
}

TEST_CASE("constant-rate control: flat ratio and t_e = t_u / n") {
    const MarkovianRate mk{0.370};
    SweepOptions opts;
    opts.root = default_root_options(mk);
    const auto report = sensitivity_sweep(mk, kSweepRange, opts);
    CHECK(std::abs(report.ratio_vs_n.exponent) < 0.05);
    for (std::size_t i = 0; i < kSweepRange.size(); ++i) {
        const double tu = report.unentangled[i].t_opt;
        const double te = report.entangled[i].t_opt;
        CHECK(te == doctest::Approx(tu / kSweepRange[i]).epsilon(0.02));
    }
}

TEST_CASE("ratio curve is independent of the total time budget") {
    const auto m = default_noise_model();
    SweepOptions a;
    a.root = default_root_options(m);
    a.total_time = 10.0;
    SweepOptions b = a;
    b.total_time = 250.0;
    const auto ra = sensitivity_sweep(m, kSweepRange, a);
    const auto rb = sensitivity_sweep(m, kSweepRange, b);
    for (std::size_t i = 0; i < ra.ratios.size(); ++i)
        CHECK(ra.ratios[i] == doctest::Approx(rb.ratios[i]).epsilon(1e-12));
}

TEST_CASE("ordering: entangled optimum is earlier and better for n >= 2") {
    const auto m = default_noise_model();
    SweepOptions opts;
    opts.root = default_root_options(m);
    const auto report = sensitivity_sweep(m, kSweepRange, opts);
    for (std::size_t i = 0; i < kSweepRange.size(); ++i) {
        CHECK(report.entangled[i].t_opt < report.unentangled[i].t_opt);
        CHECK(report.entangled[i].delta_omega_min < report.unentangled[i].delta_omega_min);
    }
}

TEST_CASE("sweep requires at least three n values") {
    const auto m = default_noise_model();
    SweepOptions opts;
    opts.root = default_root_options(m);
    const std::vector<int> two{2, 3};
    CHECK_THROWS_AS(sensitivity_sweep(m, two, opts), std::invalid_argument);
}

TEST_CASE("input validation") {
    const QuadraticRate q{0.370};
    CHECK_THROWS_AS(delta_omega(q, ProbeKind::Ghz, 0, 10.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(delta_omega(q, ProbeKind::Ghz, 2, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(optimal_time(q, ProbeKind::Ghz, 2, RootOptions{0.0, 100, 1e-6}),
                    std::invalid_argument);
    CHECK_THROWS_AS(closed_form_limits(-1.0, NoiseRegime::Zeno, 2, 10.0), std::invalid_argument);
}

} // TEST_SUITE
