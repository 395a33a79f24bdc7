#include "stableform/sharpness.hpp"

#include <algorithm>
#include <cmath>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/nonlocal.hpp"
#include "stableform/quadrature.hpp"

namespace stableform {
namespace sharpness {

TestFunction make_reference(double n) {
    if (!(n >= 1.0)) throw InvalidParam("make_reference: n >= 1 required");
    TestFunction t;
    t.name = "g_" + std::to_string(static_cast<long>(n));
    t.f = [n](double x) { return smoothstep5(std::abs(x) / n - 1.0); };
    t.df = [n](double x) {
        const double sgn = x >= 0.0 ? 1.0 : -1.0;
        return sgn * smoothstep5_d(std::abs(x) / n - 1.0) / n;
    };
    t.hess_bound = [n](double) { return 10.0 / (n * n) + 1e-9; };
    t.support_hint = std::make_pair(-2.0 * n, 2.0 * n);
    t.growth_C = 1.0;
    t.growth_rho = 0.0;
    return t;
}

ReferenceMoments reference_moments(const Measure& mu, double n) {
    if (mu.dim() != 1) throw InvalidParam("reference moments are 1-D");
    TestFunction g = make_reference(n);
    quad::QuadOptions qo;
    qo.rel_tol = 1e-11;
    // transition annulus [n, 2n] plus the exact plateau weight
    auto w1 = [&](double x) { return g(x) * std::exp(mu.log_density_radial(x)); };
    auto w2 = [&](double x) {
        const double v = g(x);
        return v * v * std::exp(mu.log_density_radial(x));
    };
    const double plateau = mu.tail_mass(2.0 * n);
    ReferenceMoments m;
    m.mu_g = 2.0 * quad::adaptive(w1, n, 2.0 * n, qo).value + plateau;
    m.mu_g2 = 2.0 * quad::adaptive(w2, n, 2.0 * n, qo).value + plateau;
    m.variance = m.mu_g2 - m.mu_g * m.mu_g;
    return m;
}

double sup_carre(double alpha, double n, int scan_points) {
    TestFunction g = make_reference(n);
    nonlocal::NonlocalOptions no;
    no.rel_tol = 1e-8;
    double best = 0.0;
    for (int i = 0; i <= scan_points; ++i) {
        const double x = 3.0 * n * i / scan_points;  // g is even; x >= 0 suffices
        best = std::max(best, nonlocal::carre(g, x, alpha, no).value);
    }
    return best;
}

DisproofReport poincare_disproof(const Measure& mu, double alpha,
                                 std::span<const double> n_values) {
    DisproofReport rep;
    nonlocal::NonlocalOptions no;
    no.rel_tol = 1e-8;
    std::vector<std::pair<double, double>> pts;
    for (double n : n_values) {
        TestFunction g = make_reference(n);
        const double energy = nonlocal::dirichlet_form(g, g, mu, alpha, no).value;
        ReferenceMoments m = reference_moments(mu, n);
        if (!(m.variance > 0.0)) throw QuadDiverged("degenerate reference variance");
        DisproofRow row{n, energy, m.variance, energy / m.variance};
        rep.rows.push_back(row);
        pts.emplace_back(n, row.ratio);
    }
    rep.ratio_slope = fit_loglog(pts, 0.0, kInf);
    rep.min_ratio = kInf;
    rep.max_ratio = -kInf;
    for (const auto& r : rep.rows) {
        rep.min_ratio = std::min(rep.min_ratio, r.ratio);
        rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    }
    return rep;
}

namespace {

void finish_sharpness(SharpnessReport& rep) {
    // running liminf over the sampled tail, and the trend flag used to call
    // a candidate rate "too small": steadily decreasing with a real net drop
    if (rep.rows.empty()) return;
    rep.running_liminf = kInf;
    for (auto it = rep.rows.rbegin(); it != rep.rows.rend(); ++it)
        rep.running_liminf = std::min(rep.running_liminf, it->functional);
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (rep.rows[i].functional > rep.rows[i - 1].functional * 1.02)
            decreasing = false;
    const double head = rep.rows.front().functional;
    const double tail = rep.rows.back().functional;
    rep.flagged_too_small = decreasing && tail < 0.85 * head;
}

}  // namespace

SharpnessReport sp_sharpness_cor13(const Measure& mu, double alpha, double eps,
                                   const std::function<double(double)>& log_beta,
                                   std::span<const double> n_values) {
    if (!(eps > 0.0)) throw InvalidParam("sp_sharpness_cor13 requires eps > 0");
    SharpnessReport rep;
    // measured proof constants: mu(g_n^2) >= c1 n^{-alpha} log^{-eps}(e+n),
    // sup Gamma(g_n) <= c n^{-alpha}
    rep.c1_hat = kInf;
    rep.c_hat = 0.0;
    std::vector<double> m2(n_values.size());
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        const double n = n_values[i];
        m2[i] = reference_moments(mu, n).mu_g2;
        rep.c1_hat = std::min(rep.c1_hat, m2[i] * std::pow(n, alpha) *
                                              std::pow(std::log(M_E + n), eps));
        rep.c_hat = std::max(rep.c_hat, sup_carre(alpha, n) * std::pow(n, alpha));
    }
    for (double n : n_values) {
        const double r_n =
            rep.c1_hat / (2.0 * rep.c_hat) * std::pow(std::log(M_E + n), -eps);
        const double f = std::pow(r_n, 1.0 / eps) * log_beta(r_n);
        rep.rows.push_back({n, r_n, f});
    }
    finish_sharpness(rep);
    return rep;
}

SharpnessReport wp_sharpness(const Measure& mu, double alpha, double eps,
                             const std::function<double(double)>& log_beta_tilde,
                             std::span<const double> n_values, WpFunctional which) {
    switch (which) {
        case WpFunctional::Cor12_3:
            if (!(eps > 0.0 && eps < alpha))
                throw InvalidParam("Cor 1.2(3) functional requires 0 < eps < alpha");
            break;
        case WpFunctional::Cor13_4:
            if (!(eps < 0.0)) throw InvalidParam("Cor 1.3(4) functional requires eps < 0");
            break;
        case WpFunctional::Cor14:
            if (!(eps > 1.0)) throw InvalidParam("Cor 1.4 functional requires eps > 1");
            break;
    }
    SharpnessReport rep;
    for (double n : n_values) {
        ReferenceMoments m = reference_moments(mu, n);
        const double r_n = 0.5 * m.variance;  // measured stand-in for c1/(2 n^eps)
        const double lb = log_beta_tilde(r_n);
        double f = 0.0;
        switch (which) {
            case WpFunctional::Cor12_3:
                f = std::pow(r_n, (alpha - eps) / eps) * std::exp(lb);
                break;
            case WpFunctional::Cor13_4:
                f = std::exp(lb) * std::pow(std::log1p(1.0 / r_n), eps);
                break;
            case WpFunctional::Cor14:
                f = std::pow(r_n, 1.0 / (eps - 1.0)) * lb;
                break;
        }
        rep.rows.push_back({n, r_n, f});
    }
    finish_sharpness(rep);
    return rep;
}

LsProbeReport log_sobolev_probe(const Measure& mu, double alpha,
                                std::span<const double> n_values) {
    LsProbeReport rep;
    nonlocal::NonlocalOptions no;
    no.rel_tol = 1e-8;
    quad::QuadOptions qo;
    qo.rel_tol = 1e-10;
    for (double n : n_values) {
        TestFunction g = make_reference(n);
        ReferenceMoments m = reference_moments(mu, n);
        const double t = 1.0 / std::sqrt(m.mu_g2);  // entropy-maximizing scale

        // f = 1 + t g: contributions only where g != 0
        auto f2logf2 = [&](double x) {
            const double fv = 1.0 + t * g(x);
            const double f2 = fv * fv;
            return f2 * std::log(f2) * std::exp(mu.log_density_radial(x));
        };
        const double plateau_f2 = (1.0 + t) * (1.0 + t);
        const double ent_plateau =
            plateau_f2 * std::log(plateau_f2) * mu.tail_mass(2.0 * n);
        const double mu_f2logf2 =
            2.0 * quad::adaptive(f2logf2, n, 2.0 * n, qo).value + ent_plateau;
        const double mu_f2 = 1.0 + 2.0 * t * m.mu_g + t * t * m.mu_g2;
        const double energy = t * t * nonlocal::dirichlet_form(g, g, mu, alpha, no).value;
        // entropy of f^2 relative to its mass, over the energy
        const double stat = (mu_f2logf2 - mu_f2 * std::log(mu_f2)) / energy;
        rep.rows.push_back({n, stat});
        rep.max_statistic = std::max(rep.max_statistic, stat);
    }
    if (rep.rows.size() >= 3) {
        const auto& r = rep.rows;
        rep.growing = r.back().statistic > r.front().statistic * 1.15 &&
                      r.back().statistic > r[r.size() - 2].statistic;
    }
    return rep;
}

}  // namespace sharpness
}  // namespace stableform
