#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stableform/criteria.hpp"
#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/quadrature.hpp"
#include "stableform/sharpness.hpp"
#include "stableform/slope.hpp"

using namespace stableform;
using namespace stableform::sharpness;

TEST_CASE("reference pieces: g_4(3) = 0, g_4(9) = 1, range [0,1], monotone") {
    auto g4 = make_reference(4.0);
    CHECK(g4(3.0) == 0.0);
    CHECK(g4(9.0) == 1.0);
    CHECK(g4(-9.0) == 1.0);
    double prev = -1.0;
    for (double x = 0.0; x <= 12.0; x += 0.05) {
        const double v = g4(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("max |g_n'| = (15/8)/n <= 2/n") {
    for (double n : {1.0, 4.0, 32.0}) {
        auto g = make_reference(n);
        double best = 0.0;
        for (double x = n; x <= 2.0 * n; x += n / 512.0)
            best = std::max(best, std::abs(g.df(x)));
        CHECK(best == doctest::Approx(1.875 / n).epsilon(1e-4));
        CHECK(best <= 2.0 / n);
    }
}

TEST_CASE("pointwise ordering: g_m <= g_n when m >= n") {
    auto g4 = make_reference(4.0);
    auto g8 = make_reference(8.0);
    auto g16 = make_reference(16.0);
    for (double x = 0.0; x <= 40.0; x += 0.25) {
        CHECK(g16(x) <= g8(x) + 1e-15);
        CHECK(g8(x) <= g4(x) + 1e-15);
    }
}

TEST_CASE("reference moments agree with a direct quadrature oracle") {
    auto mu = Measure::normalize(Potential::poly_tail(0.5, 1));
    auto g = make_reference(8.0);
    quad::QuadOptions qo;
    qo.rel_tol = 1e-11;
    auto w2 = [&](double x) {
        const double v = g(x);
        return v * v * std::exp(mu.log_density_radial(std::abs(x)));
    };
    // direct: adaptive out to a big radius + measured tail remainder
    const double direct = quad::adaptive(w2, -3000.0, 3000.0, qo).value +
                          mu.tail_mass(3000.0);
    auto m = reference_moments(mu, 8.0);
    CHECK(m.mu_g2 == doctest::Approx(direct).epsilon(1e-6));
    CHECK(m.variance > 0.0);
}

TEST_CASE("moment sandwich: mu(g_n^2) ~ n^{-eps} and mu(g_n)^2 ~ n^{-2eps}") {
    for (double eps : {0.5, 2.0}) {
        auto mu = Measure::normalize(Potential::poly_tail(eps, 1));
        std::vector<std::pair<double, double>> p2, p1;
        for (double n : {4.0, 8.0, 16.0, 32.0, 64.0}) {
            auto m = reference_moments(mu, n);
            p2.emplace_back(n, m.mu_g2);
            p1.emplace_back(n, m.mu_g * m.mu_g);
        }
        CHECK(std::abs(fit_loglog(p2, 0.0, kInf).slope + eps) < 0.1);
        CHECK(std::abs(fit_loglog(p1, 0.0, kInf).slope + 2.0 * eps) < 0.1);
    }
}

TEST_CASE("carre bound constant n^alpha sup Gamma(g_n) is stable in n") {
    const double alpha = 1.0;
    double lo = kInf, hi = 0.0;
    for (double n : {8.0, 16.0, 32.0}) {
        const double c = sup_carre(alpha, n) * std::pow(n, alpha);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK(hi / lo < 1.05);  // exact scale invariance up to quadrature error
}

TEST_CASE("variance of g_1 is positive (n = 1 edge)") {
    auto mu = Measure::normalize(Potential::poly_tail(0.5, 1));
    CHECK(reference_moments(mu, 1.0).variance > 0.0);
}

TEST_CASE("poincare disproof: ratio slope eps - alpha for eps = 0.5") {
    auto mu = Measure::normalize(Potential::poly_tail(0.5, 1));
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0};
    auto rep = poincare_disproof(mu, 1.0, ns);
    CHECK(std::abs(rep.ratio_slope.slope + 0.5) < 0.15);
    CHECK(rep.rows.back().ratio < rep.rows.front().ratio);
}

TEST_CASE("poincare disproof: eps = 2 ratio bounded away from zero, no decay") {
    auto mu = Measure::normalize(Potential::poly_tail(2.0, 1));
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0};
    auto rep = poincare_disproof(mu, 1.0, ns);
    CHECK(rep.min_ratio > 0.01);
    CHECK(rep.ratio_slope.slope > -0.1);  // no downward trend
}

TEST_CASE("sp sharpness (Cor 1.3): certified rate holds its floor, a too-small "
          "candidate decays, constants do not matter") {
    const double eps = 1.0, alpha = 1.0;
    auto mu = Measure::normalize(Potential::poly_log_tail(eps, 1, alpha));
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0, 64.0};

    auto certified = [&](double r) { return 1.0 + std::pow(r, -1.0 / eps); };
    auto rep_cert = sp_sharpness_cor13(mu, alpha, eps, certified, ns);
    CHECK(rep_cert.running_liminf > 0.0);
    CHECK_FALSE(rep_cert.flagged_too_small);

    auto small = [&](double r) { return std::pow(r, -1.0 / (2.0 * eps)); };
    auto rep_small = sp_sharpness_cor13(mu, alpha, eps, small, ns);
    CHECK(rep_small.flagged_too_small);
    for (std::size_t i = 1; i < rep_small.rows.size(); ++i)
        CHECK(rep_small.rows[i].functional < rep_small.rows[i - 1].functional + 1e-12);

    auto scaled = [&](double r) { return std::log(100.0) + small(r); };
    auto rep_scaled = sp_sharpness_cor13(mu, alpha, eps, scaled, ns);
    CHECK(rep_scaled.flagged_too_small == rep_small.flagged_too_small);
}

TEST_CASE("wp sharpness (Cor 1.2(3)): engine rate passes, constant rate flagged") {
    const double eps = 0.5, alpha = 1.0;
    auto mu = Measure::normalize(Potential::poly_tail(eps, 1));
    auto prof = build_profile(mu, alpha);
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0};
    auto engine = [&](double r) { return beta_weak_t11_log(prof, r); };
    auto rep = wp_sharpness(mu, alpha, eps, engine, ns, WpFunctional::Cor12_3);
    CHECK(rep.running_liminf > 0.0);
    CHECK_FALSE(rep.flagged_too_small);

    auto flat = [](double) { return 0.0; };  // beta~ == 1
    auto rep_flat = wp_sharpness(mu, alpha, eps, flat, ns, WpFunctional::Cor12_3);
    CHECK(rep_flat.flagged_too_small);
}

TEST_CASE("wp sharpness (Cor 1.4): engine rate clears the floor for HeavyLogTail") {
    const double eps = 2.0, alpha = 1.0;
    auto mu = Measure::normalize(Potential::heavy_log_tail(eps, 1));
    auto prof = build_profile(mu, alpha);
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0};
    auto engine = [&](double r) { return beta_weak_t11_log(prof, r); };
    auto rep = wp_sharpness(mu, alpha, eps, engine, ns, WpFunctional::Cor14);
    CHECK(rep.running_liminf > 0.0);
    CHECK_FALSE(rep.flagged_too_small);
}

TEST_CASE("wp sharpness rejects family/functional mismatches") {
    auto mu = Measure::normalize(Potential::poly_tail(0.5, 1));
    auto flat = [](double) { return 0.0; };
    std::vector<double> ns = {4.0, 8.0};
    CHECK_THROWS_AS(
        wp_sharpness(mu, 1.0, 2.0, flat, ns, WpFunctional::Cor12_3), InvalidParam);
    CHECK_THROWS_AS(
        wp_sharpness(mu, 1.0, 0.5, flat, ns, WpFunctional::Cor14), InvalidParam);
    CHECK_THROWS_AS(
        wp_sharpness(mu, 1.0, 0.5, flat, ns, WpFunctional::Cor13_4), InvalidParam);
}

TEST_CASE("log-Sobolev probe: grows for PolyLogTail(1/2), bounded for eps = 2") {
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0, 64.0};
    auto weak = Measure::normalize(Potential::poly_log_tail(0.5, 1, 1.0));
    auto rep_weak = log_sobolev_probe(weak, 1.0, ns);
    CHECK(rep_weak.growing);

    auto strong = Measure::normalize(Potential::poly_log_tail(2.0, 1, 1.0));
    auto rep_strong = log_sobolev_probe(strong, 1.0, ns);
    CHECK_FALSE(rep_strong.growing);
}
