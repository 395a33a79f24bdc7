#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stableform/quadrature.hpp"
#include "stableform/slope.hpp"

using namespace stableform;

TEST_CASE("adaptive handles smooth integrands to tight tolerance") {
    auto r = quad::adaptive([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto s = quad::adaptive([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(s.value - 2.0) <= 10.0 * (s.est_error + 1e-14));
}

TEST_CASE("adaptive resolves an integrable endpoint singularity") {
    auto r = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("panel doubling reports a usable error estimate") {
    auto r = quad::panel_doubling([](double x) { return std::exp(-x * x); }, -3.0, 3.0, 4);
    CHECK(r.converged);
    const double exact = std::sqrt(M_PI) * std::erf(3.0);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-10));
    CHECK(r.panels_used >= 8);
}

TEST_CASE("power tail map integrates z^{-5/2} exactly enough") {
    auto r = quad::integrate_power_tail([](double z) { return std::pow(z, -2.5); }, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("exp tail map handles exponential and log-heavy decay") {
    auto a = quad::integrate_exp_tail([](double l) { return std::exp(-l); }, 0.5);
    CHECK(a.converged);
    CHECK(a.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));

    // \int_2^inf lam^{-2} dlam = 1/2: polynomial decay in lam
    auto b = quad::integrate_exp_tail([](double l) { return 1.0 / (l * l); }, 2.0);
    CHECK(b.converged);
    CHECK(b.value == doctest::Approx(0.5).epsilon(1e-7));

    // divergent: \int lam^{-1} dlam must be flagged, not silently truncated
    auto c = quad::integrate_exp_tail([](double l) { return 1.0 / l; }, 2.0);
    CHECK_FALSE(c.converged);
}

TEST_CASE("log_integral survives values that overflow double") {
    const double big = 800.0;  // e^800 overflows
    double li = quad::log_integral([&](double) { return big; }, 0.0, 2.0);
    CHECK(li == doctest::Approx(big + std::log(2.0)).epsilon(1e-12));

    double g = quad::log_integral([](double x) { return -x * x; }, -40.0, 40.0);
    CHECK(g == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-8));
}

TEST_CASE("loglog slope fit recovers a power law") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 30; ++i) {
        double x = std::pow(10.0, -4.0 + 3.0 * i / 29.0);
        pts.emplace_back(x, 2.5 * std::pow(x, -1.75));
    }
    auto fit = fit_loglog(pts, 1e-4, 1e-1);
    CHECK(fit.slope == doctest::Approx(-1.75).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-9));
    CHECK(fit.residual_rms < 1e-12);
}
