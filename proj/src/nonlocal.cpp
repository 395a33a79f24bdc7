#include "stableform/nonlocal.hpp"

#include <algorithm>
#include <cmath>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"

namespace stableform {
namespace nonlocal {

namespace {

// \int_0^c P(z) / z^{1+alpha} dz for a symmetric pair integrand P = O(z^2),
// through the graded substitution z = c u^{gamma}, gamma = 3/(2-alpha):
// the transformed integrand is gamma c^{2-alpha} (P(z)/z^2) u^2, smooth at 0.
quad::QuadResult inner_graded(const std::function<double(double)>& pair_sum, double c,
                              double alpha, const NonlocalOptions& o) {
    const double gamma = 3.0 / (2.0 - alpha);
    const double scale = gamma * std::pow(c, 2.0 - alpha);
    auto integrand = [&, c, gamma, scale](double u) {
        if (u <= 0.0) return 0.0;
        const double z = c * std::pow(u, gamma);
        if (z <= 0.0) return 0.0;
        return scale * (pair_sum(z) / (z * z)) * u * u;
    };
    quad::QuadOptions qo;
    qo.rel_tol = o.rel_tol;
    qo.max_evals = o.max_evals;
    quad::QuadResult r = quad::panel_doubling(integrand, 0.0, 1.0, o.inner_panels0, qo);
    if (!r.converged)
        throw QuadDiverged("inner singular quadrature failed to converge");
    return r;
}

// \int_c^infty g(z) dz with landmark splits (density spikes of the weighted
// kernel) and a power-map tail; decay g ~ z^{-1-(alpha-rho)} is required.
quad::QuadResult outer_with_landmarks(const std::function<double(double)>& g, double c,
                                      double z_far, std::vector<double> landmarks,
                                      const NonlocalOptions& o) {
    quad::QuadOptions qo;
    qo.rel_tol = o.rel_tol;
    qo.max_evals = o.max_evals;
    landmarks.push_back(c);
    landmarks.push_back(z_far);
    std::sort(landmarks.begin(), landmarks.end());
    landmarks.erase(std::unique(landmarks.begin(), landmarks.end()), landmarks.end());
    quad::QuadResult total;
    double prev = c;
    for (double b : landmarks) {
        if (b <= prev || b > z_far) continue;
        total += quad::adaptive(g, prev, b, qo);
        prev = b;
    }
    if (prev < z_far) total += quad::adaptive(g, prev, z_far, qo);
    quad::QuadResult tail = quad::integrate_power_tail(g, z_far, 8.0, qo);
    total += tail;
    if (!total.converged)
        throw QuadDiverged("outer kernel quadrature failed to converge "
                           "(growth certificate violated?)");
    return total;
}

bool constant_outside(const TestFunction& f, double& left_val, double& right_val,
                      double& lo, double& hi) {
    if (!f.support_hint) return false;
    lo = f.support_hint->first;
    hi = f.support_hint->second;
    left_val = f(lo - 1.0);
    right_val = f(hi + 1.0);
    return true;
}

void check_growth(const TestFunction& f, double alpha, const char* who) {
    if (f.growth_rho >= alpha)
        throw InvalidParam(std::string(who) +
                           ": growth exponent must stay below alpha (class C_alpha)");
}

void probe_smoothness(const Potential& V) {
    // e^{-V} must look bounded-C^2: finite second differences at a few probes
    for (double x : {0.0, 0.5, 1.0, 5.0, 20.0, 100.0}) {
        const double h = 1e-4;
        auto ev = [&](double t) { return std::exp(-V.radial(std::abs(t))); };
        const double d2 = (ev(x + h) - 2.0 * ev(x) + ev(x - h)) / (h * h);
        if (!std::isfinite(d2) || std::abs(d2) > 1e8)
            throw SmoothnessViolation("exp(-V) fails the bounded-C^2 probe near x=" +
                                      std::to_string(x));
    }
}

}  // namespace

quad::QuadResult carre(const TestFunction& f, double x, double alpha,
                       const NonlocalOptions& o) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("carre: alpha in (0,2)");
    const double fx = f(x);
    auto pair_sum = [&](double z) {
        const double a = f(x + z) - fx;
        const double b = f(x - z) - fx;
        return a * a + b * b;
    };
    quad::QuadResult total = inner_graded(pair_sum, 1.0, alpha, o);

    auto outer_g = [&](double z) { return pair_sum(z) / std::pow(z, 1.0 + alpha); };
    double cl, cr, lo, hi;
    if (constant_outside(f, cl, cr, lo, hi)) {
        // beyond z_flat both x+z and x-z sit in the constant region
        const double z_flat = std::max({1.0, x - lo, hi - x}) + 1.0;
        quad::QuadResult mid = quad::adaptive(outer_g, 1.0, z_flat,
                                              {o.rel_tol, 1e-14, o.max_evals, 52});
        const double gconst = (cr - fx) * (cr - fx) + (cl - fx) * (cl - fx);
        quad::QuadResult tail;
        tail.value = gconst * std::pow(z_flat, -alpha) / alpha;
        tail.est_error = 1e-15 * std::abs(tail.value);
        total += mid;
        total += tail;
        if (!mid.converged) throw QuadDiverged("carre outer quadrature diverged");
    } else {
        check_growth(f, 0.5 * alpha, "carre");  // Gamma needs 2 rho < alpha
        total += outer_with_landmarks(outer_g, 1.0, 10.0 * (1.0 + std::abs(x)), {}, o);
    }
    return total;
}

quad::QuadResult generator_apply(const TestFunction& f, const Potential& V, double x,
                                 double alpha, const NonlocalOptions& o) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("generator: alpha in (0,2)");
    check_growth(f, alpha, "generator");
    probe_smoothness(V);

    const double fx = f(x);
    const double vx = V.radial(std::abs(x));
    const double c = o.cutoff;

    // Summed over +-z the drift compensators cancel identically and the
    // |z| <= c integrand collapses to
    //   P(z) = (D+ + D-) + D+ e^{V(x)-V(x+z)} + D- e^{V(x)-V(x-z)},
    // with D+- = f(x+-z) - f(x); every term is O(z^2). Below z_switch the
    // second differences drown in roundoff, so the quotient is frozen there.
    auto pair_raw = [&](double z) {
        const double dp = f(x + z) - fx;
        const double dm = f(x - z) - fx;
        const double ep = std::exp(vx - V.radial(std::abs(x + z)));
        const double em = std::exp(vx - V.radial(std::abs(x - z)));
        return (dp + dm) + dp * ep + dm * em;
    };
    // below z_switch the second difference sits in roundoff (noise ~ eps/z^2);
    // the committed freeze error is O(z_switch^{3-alpha})
    const double z_switch = 1e-4 * (1.0 + std::abs(x));
    const double frozen_quotient = pair_raw(z_switch) / (z_switch * z_switch);
    auto pair_sum = [&](double z) {
        if (z < z_switch) return frozen_quotient * z * z;
        return pair_raw(z);
    };
    quad::QuadResult total = inner_graded(pair_sum, c, alpha, o);

    // |z| > c: plain jumps weighted by 1 + e^{V(x)-V(y)}; the spike of the
    // weight sits where y = x -+ z crosses the origin
    auto side = [&](int sgn) {
        auto g = [&, sgn](double z) {
            const double y = x + sgn * z;
            const double w = 1.0 + std::exp(vx - V.radial(std::abs(y)));
            return (f(y) - fx) * w / std::pow(z, 1.0 + alpha);
        };
        std::vector<double> marks;
        const double spike = -sgn * x;  // z where y = 0
        if (spike > c) {
            marks.push_back(std::max(c, spike - 5.0));
            marks.push_back(spike + 5.0);
        }
        const double z_far = std::max(10.0 * (1.0 + std::abs(x)), c + 10.0);
        return outer_with_landmarks(g, c, z_far, marks, o);
    };
    total += side(+1);
    total += side(-1);
    return total;
}

quad::QuadResult dirichlet_form(const TestFunction& f, const TestFunction& g,
                                const Measure& mu, double alpha,
                                const NonlocalOptions& o) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("dirichlet_form: alpha in (0,2)");
    check_growth(f, alpha, "dirichlet_form");
    check_growth(g, alpha, "dirichlet_form");

    double fl, fr, flo, fhi, gl, gr, glo, ghi;
    const bool f_flat = constant_outside(f, fl, fr, flo, fhi);
    const bool g_flat = constant_outside(g, gl, gr, glo, ghi);

    NonlocalOptions inner_opts = o;
    inner_opts.rel_tol = std::max(o.rel_tol, 1e-9);
    double inner_err_max = 0.0;

    auto gamma_fg = [&](double x) {
        const double fx = f(x), gx = g(x);
        auto pair_sum = [&](double z) {
            return (f(x + z) - fx) * (g(x + z) - gx) + (f(x - z) - fx) * (g(x - z) - gx);
        };
        quad::QuadResult r = inner_graded(pair_sum, 1.0, alpha, inner_opts);
        auto outer_g = [&](double z) { return pair_sum(z) / std::pow(z, 1.0 + alpha); };
        if (f_flat && g_flat) {
            const double z_flat =
                std::max({1.0, x - flo, fhi - x, x - glo, ghi - x}) + 1.0;
            quad::QuadResult mid = quad::adaptive(outer_g, 1.0, z_flat,
                                                  {inner_opts.rel_tol, 1e-14,
                                                   inner_opts.max_evals, 52});
            r += mid;
            const double pconst = (fr - fx) * (gr - gx) + (fl - fx) * (gl - gx);
            r.value += pconst * std::pow(z_flat, -alpha) / alpha;
        } else {
            r += outer_with_landmarks(outer_g, 1.0, 10.0 * (1.0 + std::abs(x)), {},
                                      inner_opts);
        }
        inner_err_max = std::max(inner_err_max, r.est_error);
        return r.value;
    };

    // outer x-integral against the measure
    double x_core = 20.0;
    if (f_flat) x_core = std::max({x_core, std::abs(flo), std::abs(fhi)});
    if (g_flat) x_core = std::max({x_core, std::abs(glo), std::abs(ghi)});
    x_core += 5.0;

    auto weighted = [&](double x) {
        std::vector<double> p{x};
        const double rho = mu.density(p);
        return rho > 0.0 ? gamma_fg(x) * rho : 0.0;
    };
    quad::QuadOptions qo;
    qo.rel_tol = std::max(o.rel_tol, 1e-8);
    qo.abs_tol = 1e-13;
    quad::QuadResult core = quad::adaptive(weighted, -x_core, x_core, qo);
    quad::QuadResult tail_r = quad::integrate_power_tail(weighted, x_core, 8.0, qo);
    quad::QuadResult tail_l = quad::integrate_power_tail(
        [&](double x) { return weighted(-x); }, x_core, 8.0, qo);

    quad::QuadResult total;
    total.value = core.value + tail_r.value + tail_l.value;
    total.est_error =
        core.est_error + tail_r.est_error + tail_l.est_error + inner_err_max;
    total.panels_used = core.panels_used + tail_r.panels_used + tail_l.panels_used;
    total.converged = core.converged && tail_r.converged && tail_l.converged;
    if (!total.converged) throw QuadDiverged("dirichlet_form outer integral diverged");
    return total;
}

TestFunction lyapunov_phi(double alpha0) {
    if (!(alpha0 > 0.0 && alpha0 < 1.0))
        throw InvalidParam("lyapunov_phi: alpha0 must lie in (0,1)");
    TestFunction t;
    t.name = "lyapunov_phi(" + std::to_string(alpha0) + ")";
    const double K = 1.0 + std::pow(0.5, alpha0);  // constant core value
    t.f = [alpha0, K](double x) {
        const double s = std::abs(x);
        if (s >= 1.0) return 1.0 + std::pow(s, alpha0);
        if (s <= 0.5) return K;
        const double u = 2.0 * s - 1.0;
        const double T = 1.0 + std::pow(s, alpha0);
        return K + (T - K) * smoothstep5(u);
    };
    t.df = [alpha0, K](double x) {
        const double s = std::abs(x);
        const double sgn = x >= 0.0 ? 1.0 : -1.0;
        if (s >= 1.0) return sgn * alpha0 * std::pow(s, alpha0 - 1.0);
        if (s <= 0.5) return 0.0;
        const double u = 2.0 * s - 1.0;
        const double T = 1.0 + std::pow(s, alpha0);
        const double Tp = alpha0 * std::pow(s, alpha0 - 1.0);
        return sgn * (Tp * smoothstep5(u) + (T - K) * 2.0 * smoothstep5_d(u));
    };
    t.hess_bound = [alpha0](double) { return 30.0 * (1.0 + alpha0); };
    t.growth_C = 2.0;
    t.growth_rho = alpha0;
    return t;
}

LyapunovReport lyapunov_check(const Potential& V, double alpha, double alpha0,
                              std::span<const double> x_grid,
                              const std::function<double(double)>& Phi_of_r,
                              double c1_threshold, const NonlocalOptions& o) {
    if (!(alpha0 > 0.0 && alpha0 < std::min(1.0, alpha)))
        throw InvalidParam("lyapunov_check: alpha0 must lie in (0, min(1, alpha))");
    TestFunction phi = lyapunov_phi(alpha0);

    LyapunovReport rep;
    rep.alpha0 = alpha0;
    rep.c1_threshold = c1_threshold;
    for (double x : x_grid) {
        quad::QuadResult lr = generator_apply(phi, V, x, alpha, o);
        LyapunovRow row;
        row.x = x;
        row.l_phi = lr.value;
        row.l_phi_err = lr.est_error;
        row.capital_phi = Phi_of_r(std::abs(x));
        row.phi = phi(x);
        row.ratio = -lr.value / (row.capital_phi * row.phi);
        rep.rows.push_back(row);
    }
    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const LyapunovRow& a, const LyapunovRow& b) {
                  return std::abs(a.x) < std::abs(b.x);
              });

    // smallest grid radius past which the drift ratio clears the threshold
    double suffix_min = kInf;
    double r0 = kInf;
    double inf_tail = kInf;
    for (int i = static_cast<int>(rep.rows.size()) - 1; i >= 0; --i) {
        suffix_min = std::min(suffix_min, rep.rows[i].ratio);
        if (suffix_min >= c1_threshold) {
            r0 = std::abs(rep.rows[i].x);
            inf_tail = suffix_min;
        }
    }
    rep.r0_empirical = r0;
    rep.inf_ratio_tail = inf_tail;
    double sup_inner = 0.0;
    bool finite = true;
    for (const auto& row : rep.rows) {
        if (!std::isfinite(row.l_phi)) finite = false;
        if (std::abs(row.x) <= r0 || r0 == kInf)
            sup_inner = std::max(sup_inner, std::abs(row.l_phi));
    }
    rep.sup_abs_lphi_inner = sup_inner;
    rep.success = finite && r0 != kInf;
    return rep;
}

}  // namespace nonlocal
}  // namespace stableform
