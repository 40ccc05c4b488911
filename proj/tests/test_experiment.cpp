#include "doctest.h"

#include <cmath>
#include <vector>

#include "zenometry/experiment.hpp"

using namespace zenometry;

TEST_SUITE("experiment") {

TEST_CASE("nyquist guard") {
    CHECK(nyquist_interval(7, 10.0) == doctest::Approx(std::numbers::pi / 70.0));
    const auto fine = linspace(0.0, 1.2, 481);   // dt = 0.0025
    const auto coarse = linspace(0.0, 1.2, 21);  // dt = 0.06 > pi/70
    CHECK(grid_satisfies_nyquist(fine, 7, 10.0));
    CHECK_FALSE(grid_satisfies_nyquist(coarse, 7, 10.0));

    const auto m = default_noise_model();
    EnsembleConfig cfg{20, 1000, 1, 7};
    CHECK_THROWS_AS(run_experiment_point(m, cfg, 7, 10.0, coarse), std::invalid_argument);
}

TEST_CASE("fringe spectrum peaks at n omega0") {
    const auto grid = linspace(0.0, 1.2, 481);
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        p[i] = ramsey_population_model(grid[i], 7, 10.0, 0.0);
    const auto spec = fringe_spectrum(grid, p, 4096);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < spec.power.size(); ++k)
        if (spec.power[k] > spec.power[peak]) peak = k;
    const double bin = 2.0 * std::numbers::pi / 1.2;
    CHECK(std::abs(spec.omega[peak] - 70.0) <= bin);
}

TEST_CASE("single experiment point reproduces the headline n=7 numbers") {
    const auto m = default_noise_model();
    EnsembleConfig cfg{2000, 1000, 616, 0};
    const auto grid = linspace(0.0, 1.2, 481);
    const auto point = run_experiment_point(m, cfg, 7, 10.0, grid, {10.0, {2, 0, PhaseMethod::Exact}, {}});
    CHECK(point.fit_unentangled.c_hat == doctest::Approx(0.37).epsilon(0.08));
    CHECK(point.fit_ghz.c_hat == doctest::Approx(0.37).epsilon(0.08));
    CHECK(point.sens_unentangled.t_opt == doctest::Approx(0.822).epsilon(0.06));
    CHECK(point.sens_ghz.t_opt == doctest::Approx(0.311).epsilon(0.06));
    CHECK(point.sens_unentangled.delta_omega == doctest::Approx(0.169).epsilon(0.05));
    CHECK(point.sens_ghz.delta_omega == doctest::Approx(0.104).epsilon(0.05));
    CHECK(point.ratio == doctest::Approx(std::pow(7.0, 0.25)).epsilon(0.05));
}

TEST_CASE("empirical sweep recovers the Zeno exponents (reduced m smoke run)") {
    const auto m = default_noise_model();
    EnsembleConfig cfg{800, 1000, 909, 0};
    const auto grid = linspace(0.0, 1.2, 481);
    const std::vector<int> ns{2, 3, 4, 5, 6, 7};
    const auto report =
        empirical_scaling_sweep(m, cfg, ns, 10.0, grid, {10.0, {2, 0, PhaseMethod::Exact}, {}});
    CHECK(std::abs(report.ratio_vs_n.exponent - 0.25) < 0.05);
    CHECK(std::abs(report.delta_e_vs_n.exponent + 0.75) < 0.05);
    CHECK(report.t_e_vs_n.exponent == doctest::Approx(-0.5).epsilon(0.15));
    for (const auto& pt : report.points) {
        CHECK(pt.fit_unentangled.converged);
        CHECK(pt.fit_ghz.converged);
    }
}

TEST_CASE("GHZ envelope coefficient scales as n times the single-qubit fit") {
    const auto m = default_noise_model();
    const auto grid = linspace(0.0, 1.2, 481);
    EnsembleConfig cfg{1200, 1000, 11, 0};

    auto fit_ghz_curve = [&](int n) {
        EnsembleConfig c = cfg;
        c.qubit_count = n;
        const auto curve = simulate_ramsey({ProbeKind::Ghz, n, 10.0}, m, c, grid,
                                           {2, 0, PhaseMethod::Exact});
        return fit_ramsey(curve.times, curve.p_mean, n);
    };
    const auto base = fit_ghz_curve(1);
    REQUIRE(base.converged);
    for (int n : {2, 5}) {
        const auto fit = fit_ghz_curve(n);
        REQUIRE(fit.converged);
        CHECK(static_cast<double>(n) * fit.c_hat ==
              doctest::Approx(static_cast<double>(n) * base.c_hat).epsilon(0.05));
    }
}

TEST_CASE("sweep demands at least three n values") {
    const auto m = default_noise_model();
    EnsembleConfig cfg{50, 1000, 3, 0};
    const auto grid = linspace(0.0, 1.2, 481);
    const std::vector<int> two{2, 3};
    CHECK_THROWS_AS(empirical_scaling_sweep(m, cfg, two, 10.0, grid), std::invalid_argument);
}

} // TEST_SUITE
