// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. Each TEST_CASE is registered as its own ctest entry.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "stableform/criteria.hpp"
#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/nonlocal.hpp"
#include "stableform/quadrature.hpp"
#include "stableform/sharpness.hpp"
#include "stableform/slope.hpp"
#include "stableform/spectral.hpp"
#include "stableform/testfunction.hpp"

using namespace stableform;

namespace {

void verdict(const char* id, const char* what, bool ok, const std::string& detail) {
    std::printf("[ACCEPTANCE] %s %s: %s (%s)\n", id, what, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

Measure poly_tail_measure(double eps) {
    return Measure::normalize(Potential::poly_tail(eps, 1));
}

// -int f L g dmu over the support of f, with the generator error tracked
struct PairedIntegral {
    double value;
    double est_error;
};

PairedIntegral minus_f_Lg_dmu(const TestFunction& f, const TestFunction& g,
                              const Potential& pot, const Measure& mu, double alpha) {
    double gen_err_max = 0.0;
    quad::QuadOptions qo;
    qo.rel_tol = 1e-9;
    auto integrand = [&](double x) {
        const double fv = f(x);
        if (fv == 0.0) return 0.0;
        auto lg = nonlocal::generator_apply(g, pot, x, alpha);
        gen_err_max = std::max(gen_err_max, lg.est_error);
        std::vector<double> p{x};
        return -fv * lg.value * mu.density(p);
    };
    const auto [lo, hi] = *f.support_hint;
    auto r = quad::adaptive(integrand, lo, hi, qo);
    return {r.value, r.est_error + gen_err_max};
}

}  // namespace

TEST_CASE("C01 symmetry identity (Prop 2.1)") {
    auto pot = Potential::poly_tail(2.0, 1);
    auto mu = Measure::normalize(pot);
    std::vector<std::pair<TestFunction, TestFunction>> pairs;
    pairs.emplace_back(bump(0.0, 2.0), bump(0.7, 1.5));
    pairs.emplace_back(bump(-1.0, 2.0), bump(1.0, 2.0));
    pairs.emplace_back(bump(0.0, 3.0), bump(0.0, 1.0));
    pairs.emplace_back(bump(0.5, 1.0), bump(0.5, 1.0));
    pairs.emplace_back(bump(-2.0, 1.5), bump(2.0, 1.5));

    bool all_ok = true;
    double worst_rel = 0.0;
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (const auto& [f, g] : pairs) {
            auto lhs = minus_f_Lg_dmu(f, g, pot, mu, alpha);
            auto rhs = nonlocal::dirichlet_form(f, g, mu, alpha);
            const double diff = std::abs(lhs.value - rhs.value);
            const double scale = std::max(std::abs(lhs.value), std::abs(rhs.value));
            const double rel = diff / scale;
            worst_rel = std::max(worst_rel, rel);
            const bool ok =
                diff <= 3.0 * (lhs.est_error + rhs.est_error) + 1e-12 && rel <= 1e-5;
            all_ok = all_ok && ok;
            CHECK(ok);
        }
    }
    std::ostringstream d;
    d << "worst relative mismatch " << worst_rel << " over 5 pairs x 3 alphas";
    verdict("C01", "symmetry identity", all_ok, d.str());
}

TEST_CASE("C02 Lyapunov drift (Prop 2.3)") {
    bool all_ok = true;
    std::ostringstream d;
    for (auto pot : {Potential::poly_tail(1.0, 1), Potential::stretched_log(0.5, 1)}) {
        const double alpha = 1.0;
        auto mu = Measure::normalize(pot);
        auto prof = build_profile(mu, alpha);
        std::vector<double> grid;
        for (int i = 0; i < 12; ++i) {
            const double x = 20.0 * std::pow(10.0, i / 11.0);
            grid.push_back(x);
            grid.push_back(-x);
        }
        auto rep = nonlocal::lyapunov_check(
            pot, alpha, 0.5, grid, [&](double r) { return prof.Phi(r); }, 0.01);
        double min_ratio = kInf;
        for (const auto& row : rep.rows) min_ratio = std::min(min_ratio, row.ratio);
        // finiteness of the generator on the core
        bool inner_finite = true;
        auto phi = nonlocal::lyapunov_phi(0.5);
        for (double x : {0.0, 3.0, 9.0, 15.0, 20.0}) {
            auto l = nonlocal::generator_apply(phi, pot, x, alpha);
            inner_finite = inner_finite && std::isfinite(l.value);
        }
        const bool ok = min_ratio >= 0.01 && inner_finite;
        all_ok = all_ok && ok;
        CHECK(ok);
        d << pot.describe() << " min ratio " << min_ratio << "; ";
    }
    verdict("C02", "Lyapunov drift ratio >= 0.01 on [20,200]", all_ok, d.str());
}

TEST_CASE("C03 reference-function bound slope") {
    bool all_ok = true;
    std::ostringstream d;
    for (double alpha : {0.5, 1.0, 1.5}) {
        std::vector<std::pair<double, double>> pts;
        for (double n : {4.0, 8.0, 16.0, 32.0, 64.0})
            pts.emplace_back(n, sharpness::sup_carre(alpha, n));
        auto fit = fit_loglog(pts, 0.0, kInf);
        const bool ok = std::abs(fit.slope + alpha) <= 0.1;
        all_ok = all_ok && ok;
        CHECK(ok);
        d << "alpha=" << alpha << " slope " << fit.slope << "; ";
    }
    verdict("C03", "sup Gamma(g_n) ~ n^{-alpha}", all_ok, d.str());
}

TEST_CASE("C04 Poincare dichotomy (Cor 1.2(1))") {
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0, 64.0};
    auto fail_side = sharpness::poincare_disproof(poly_tail_measure(0.5), 1.0, ns);
    const bool slope_ok = std::abs(fail_side.ratio_slope.slope + 0.5) <= 0.15;
    CHECK(slope_ok);

    auto hold_side = sharpness::poincare_disproof(poly_tail_measure(2.0), 1.0, ns);
    const double spread = hold_side.max_ratio / hold_side.min_ratio;
    const bool floor_ok = hold_side.min_ratio > 0.01;
    const bool spread_ok = spread < 10.0;
    CHECK(floor_ok);
    CHECK(spread_ok);

    std::ostringstream d;
    d << "eps=0.5 slope " << fail_side.ratio_slope.slope << "; eps=2 spread x"
      << spread << ", floor " << hold_side.min_ratio;
    verdict("C04", "Poincare dichotomy", slope_ok && floor_ok && spread_ok, d.str());
}

TEST_CASE("C05 super-Poincare rate shape (Cor 1.2(2))") {
    auto prof = build_profile(poly_tail_measure(2.0), 1.0);
    RateCurve c = sample_engine_curve(RateKind::SuperBeta_T11, prof, 1e-5, 1e-2, 32);
    const bool slope_ok = std::abs(c.loglog_fit.slope + 10.0) <= 0.5;
    CHECK(slope_ok);

    auto critical = build_profile(poly_tail_measure(1.0), 1.0);
    bool inapplicable = false;
    try {
        (void)beta_super_t11_log(critical, 1e-3);
    } catch (const CriterionInapplicable&) {
        inapplicable = true;
    }
    CHECK(inapplicable);
    std::ostringstream d;
    d << "slope " << c.loglog_fit.slope << " (target -10 +- 0.5); eps=1 inapplicable="
      << inapplicable;
    verdict("C05", "super-Poincare rate shape", slope_ok && inapplicable, d.str());
}

TEST_CASE("C06 corollary curve agreement") {
    bool all_ok = true;
    std::ostringstream d;
    const double r_lo = 1e-5, r_hi = 1e-2;
    const int pts = 32;

    auto check_pair = [&](const char* name, const RateCurve& engine,
                          const RateCurve& closed, GrowthFunctional g) {
        auto fe = fit_growth(engine, g, r_lo, r_hi);
        auto fc = fit_growth(closed, g, r_lo, r_hi);
        const bool ok = std::abs(fe.slope - fc.slope) <= 0.1 * std::abs(fc.slope);
        all_ok = all_ok && ok;
        CHECK(ok);
        d << name << " engine " << fe.slope << " vs closed " << fc.slope << "; ";
    };

    {  // Cor 1.3(1): PolyLogTail(eps=1)
        auto mu = Measure::normalize(Potential::poly_log_tail(1.0, 1, 1.0));
        auto prof = build_profile(mu, 1.0);
        RateCurve e = sample_engine_curve(RateKind::SuperBeta_T11, prof, r_lo, r_hi, pts);
        CorollaryParams p;
        p.d = 1;
        p.alpha = 1.0;
        p.eps = 1.0;
        RateCurve c = closed_form_curve(CorollaryId::C13_Super, p, r_lo, r_hi, pts);
        check_pair("cor13(1)", e, c, GrowthFunctional::LogLogVsLogR);
    }
    {  // Cor 1.4: HeavyLogTail(eps=2)
        auto mu = Measure::normalize(Potential::heavy_log_tail(2.0, 1));
        auto prof = build_profile(mu, 1.0);
        RateCurve e = sample_engine_curve(RateKind::WeakBeta_T11, prof, r_lo, r_hi, pts);
        CorollaryParams p;
        p.d = 1;
        p.alpha = 1.0;
        p.eps = 2.0;
        RateCurve c = closed_form_curve(CorollaryId::C14_Weak, p, r_lo, r_hi, pts);
        check_pair("cor14", e, c, GrowthFunctional::LogLogVsLogR);
    }
    {  // Cor 1.5(1): StretchedLog(eps=0.5)
        auto mu = Measure::normalize(Potential::stretched_log(0.5, 1));
        auto prof = build_profile(mu, 1.0);
        RateCurve e = sample_engine_curve(RateKind::SuperBeta_T11, prof, r_lo, r_hi, pts);
        CorollaryParams p;
        p.d = 1;
        p.alpha = 1.0;
        p.eps = 0.5;
        RateCurve c = closed_form_curve(CorollaryId::C15_1_Super, p, r_lo, r_hi, pts);
        check_pair("cor15(1)", e, c, GrowthFunctional::LogVsLogR);
    }
    {  // Cor 1.5(2): SubGaussian(eps=1)
        auto mu = Measure::normalize(Potential::sub_gaussian(1.0, 1));
        auto prof = build_profile(mu, 1.0);
        RateCurve e = sample_engine_curve(RateKind::SuperBeta_T11, prof, r_lo, r_hi, pts);
        CorollaryParams p;
        p.d = 1;
        p.alpha = 1.0;
        p.eps = 1.0;
        RateCurve c = closed_form_curve(CorollaryId::C15_2_Super, p, r_lo, r_hi, pts);
        check_pair("cor15(2)", e, c, GrowthFunctional::LogVsLogR);
    }
    verdict("C06", "corollary curve agreement within 10%", all_ok, d.str());
}

TEST_CASE("C07 section-5 comparison on SubGaussian") {
    auto mu = Measure::normalize(Potential::sub_gaussian(1.0, 1));
    auto prof = build_profile(mu, 1.0);
    const int pts = 25;
    RateCurve t51 = sample_engine_curve(RateKind::SuperBeta_T51, prof, 1e-4, 1e-1, pts);
    RateCurve t11 = sample_engine_curve(RateKind::SuperBeta_T11, prof, 1e-4, 1e-1, pts);
    // ratio log beta_51 / log beta_11 must blow up monotonically as r -> 0
    // over the last decade of the window
    bool monotone = true;
    double first_ratio = 0.0, last_ratio = 0.0;
    double prev = -kInf;
    for (int i = pts - 1; i >= 0; --i) {
        const double r = t51.samples[i].r;
        const double ratio = t51.samples[i].log_value / t11.samples[i].log_value;
        if (r <= 1e-3) {  // last decade, marching toward r -> 0
            if (ratio < prev * (1.0 - 1e-9)) monotone = false;
            prev = ratio;
            last_ratio = ratio;
            if (first_ratio == 0.0) first_ratio = ratio;
        }
    }
    const bool grows = last_ratio > first_ratio && last_ratio > 1.0;
    CHECK(monotone);
    CHECK(grows);

    auto small = build_profile(Measure::normalize(Potential::sub_gaussian(0.25, 1)), 1.0);
    bool inapplicable = false;
    try {
        (void)beta_super_t51_log(small, 0.5, 1e-3);
    } catch (const CriterionInapplicable&) {
        inapplicable = true;
    }
    CHECK(inapplicable);
    std::ostringstream d;
    d << "log-ratio " << first_ratio << " -> " << last_ratio
      << " over the last decade; eps=0.25 inapplicable=" << inapplicable;
    verdict("C07", "t51 strictly worse than t11", monotone && grows && inapplicable,
            d.str());
}

TEST_CASE("C08 local Poincare bound (Lemma 3.2)") {
    bool all_ok = true;
    std::ostringstream d;
    const double alpha = 1.0;
    auto pots = {Potential::poly_tail(2.0, 1), Potential::poly_log_tail(1.0, 1, alpha)};
    for (const auto& pot : pots) {
        auto mu = Measure::normalize(pot);
        auto prof = build_profile(mu, alpha);
        for (double r : {1.0, 5.0, 20.0}) {
            const double c_loc = spectral::local_poincare_constant(mu, alpha, r, 512);
            const double bound = prof.log_psi2(r) + std::log(1.05);
            const bool ok = std::log(c_loc) <= bound;
            all_ok = all_ok && ok;
            CHECK(ok);
            d << pot.describe() << " r=" << r << " C_loc=" << c_loc << " Psi2="
              << std::exp(prof.log_psi2(r)) << "; ";
        }
    }
    verdict("C08", "C_loc(r) <= 1.05 Psi2(r)", all_ok, d.str());
}

TEST_CASE("C09 spectral sanity") {
    auto mu = poly_tail_measure(2.0);
    const double alpha = 1.0, R = 40.0;
    using spectral::assemble;
    using spectral::BoundaryMode;
    const double l256 =
        spectral::spectral_gap(assemble(mu, alpha, R, 256, BoundaryMode::Censored)).lambda1;
    auto form512 = assemble(mu, alpha, R, 512, BoundaryMode::Censored);
    const double l512 = spectral::spectral_gap(form512).lambda1;
    const double l1024 =
        spectral::spectral_gap(assemble(mu, alpha, R, 1024, BoundaryMode::Censored)).lambda1;
    const double ratio = std::abs(l1024 - l512) / std::abs(l512 - l256);
    const bool cauchy_ok = ratio < 0.6;
    CHECK(cauchy_ok);

    std::vector<double> f0 = form512.sample(tanh_ramp(1.0));
    const double mean =
        form512.mu_dot(f0, std::vector<double>(f0.size(), 1.0)) / form512.mu_mass();
    for (auto& v : f0) v -= mean;
    std::vector<double> times;
    for (int i = 0; i <= 30; ++i) times.push_back(0.2 * i / l512);
    auto curve = spectral::semigroup_decay(form512, f0, times);
    const double rate_err = std::abs(curve.fitted_rate - l512) / l512;
    const bool rate_ok = rate_err <= 0.05;
    CHECK(rate_ok);
    std::ostringstream d;
    d << "lambda1 " << l256 << " -> " << l512 << " -> " << l1024 << ", Cauchy ratio "
      << ratio << "; decay rate " << curve.fitted_rate << " (err " << rate_err << ")";
    verdict("C09", "self-convergence + semigroup rate", cauchy_ok && rate_ok, d.str());
}

TEST_CASE("C10 quadratic-form inequality (eq. proof)") {
    auto pot = Potential::poly_tail(2.0, 1);
    auto mu = Measure::normalize(pot);
    auto family = canonical_family(10);
    bool all_ok = true;
    double worst_gap = kInf;
    for (double alpha : {0.5, 1.0, 1.5}) {
        const double alpha0 = 0.5 * std::min(1.0, alpha);
        auto phi = nonlocal::lyapunov_phi(alpha0);
        for (const auto& f : family) {
            double gen_err = 0.0;
            quad::QuadOptions qo;
            qo.rel_tol = 1e-8;
            auto integrand = [&](double x) {
                const double fv = f(x);
                if (fv * fv < 1e-15) return 0.0;
                auto lphi = nonlocal::generator_apply(phi, pot, x, alpha);
                gen_err = std::max(gen_err, lphi.est_error);
                std::vector<double> p{x};
                return fv * fv * (-lphi.value / phi(x)) * mu.density(p);
            };
            auto core = quad::adaptive(integrand, -25.0, 25.0, qo);
            auto tp = quad::integrate_power_tail(integrand, 25.0, 8.0, qo);
            auto tm = quad::integrate_power_tail(
                [&](double x) { return integrand(-x); }, 25.0, 8.0, qo);
            auto e = nonlocal::dirichlet_form(f, f, mu, alpha);
            const double lhs = core.value + tp.value + tm.value;
            const double tol = core.est_error + tp.est_error + tm.est_error +
                               e.est_error + gen_err + 1e-9;
            const bool ok = lhs <= e.value + tol;
            worst_gap = std::min(worst_gap, e.value + tol - lhs);
            all_ok = all_ok && ok;
            CHECK(ok);
        }
    }
    std::ostringstream d;
    d << "10 functions x 3 alphas, smallest slack " << worst_gap;
    verdict("C10", "mu(f^2 (-L phi)/phi) <= E(f,f)", all_ok, d.str());
}

TEST_CASE("C11 sharpness functionals (Cor 1.3(2))") {
    const double eps = 1.0, alpha = 1.0;
    auto mu = Measure::normalize(Potential::poly_log_tail(eps, 1, alpha));
    auto prof = build_profile(mu, alpha);
    std::vector<double> ns = {4.0, 8.0, 16.0, 32.0, 64.0};

    auto engine = [&](double r) { return beta_super_t11_log(prof, r); };
    auto cert = sharpness::sp_sharpness_cor13(mu, alpha, eps, engine, ns);
    double f16 = 0.0, f8 = 0.0, f64 = 0.0;
    for (const auto& row : cert.rows) {
        if (row.n == 16.0) f16 = row.functional;
        if (row.n == 64.0) f64 = row.functional;
    }
    double liminf_after_16 = kInf;
    for (const auto& row : cert.rows)
        if (row.n >= 16.0) liminf_after_16 = std::min(liminf_after_16, row.functional);
    const bool cert_ok = liminf_after_16 > 0.5 * f16;
    CHECK(cert_ok);

    auto candidate = [&](double r) { return std::pow(r, -1.0 / (2.0 * eps)); };
    auto weak = sharpness::sp_sharpness_cor13(mu, alpha, eps, candidate, ns);
    double w8 = 0.0, w64 = 0.0;
    for (const auto& row : weak.rows) {
        if (row.n == 8.0) w8 = row.functional;
        if (row.n == 64.0) w64 = row.functional;
    }
    (void)f8;
    const bool cand_ok = w64 < 0.25 * w8;
    CHECK(cand_ok);
    std::ostringstream d;
    d << "certified liminf(n>=16) " << liminf_after_16 << " vs 0.5*F(16) = "
      << 0.5 * f16 << "; candidate F(64)/F(8) = " << w64 / w8 << " (needs < 0.25)";
    verdict("C11", "sharpness functionals", cert_ok && cand_ok, d.str());
}

TEST_CASE("C12 reproducibility of the report run") {
    namespace fs = std::filesystem;
    const char* cli = STABLEFORM_CLI_PATH;
    fs::path dir = fs::temp_directory_path() / "stableform_acceptance_c12";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string base = std::string(cli) +
                             " --family poly_tail --eps 2.0 --alpha 1.0 --points 8 "
                             "--seed 42 report --out ";
    auto run = [&](const std::string& sub) {
        const std::string cmd = std::string(cli) +
                                " --family poly_tail --eps 2.0 --alpha 1.0 --points 8 "
                                "--seed 42 --out " +
                                (dir / sub).string() + " report > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    REQUIRE(run("a") == 0);
    REQUIRE(run("b") == 0);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(dir / "a" / "report.json");
    const std::string b = slurp(dir / "b" / "report.json");
    const bool ok = !a.empty() && a == b;
    CHECK(ok);
    std::ostringstream d;
    d << "report.json " << a.size() << " bytes, byte-identical=" << (a == b);
    verdict("C12", "reproducibility", ok, d.str());
}
