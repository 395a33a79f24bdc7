#include "stableform/criteria.hpp"

#include <algorithm>
#include <cmath>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/quadrature.hpp"

namespace stableform {

namespace {

constexpr double kLamMin = -18.420680743952367;  // log(1e-8)
constexpr double kLamFloor = -30.0;

// golden-section descent on [a, b]; assumes local unimodality near the min
double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters = 60) {
    const double gr = 0.618033988749894848;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best = std::min(f1, f2);
    for (int i = 0; i < iters && b - a > 1e-13; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
        best = std::min(best, std::min(f1, f2));
    }
    return best;
}

// grid scan with a golden refinement pass around the best bracket
double subscan_min(const std::function<double(double)>& f, double a, double b, int k) {
    double m = kInf;
    int arg = 0;
    for (int i = 0; i <= k; ++i) {
        const double v = f(a + (b - a) * i / k);
        if (v < m) {
            m = v;
            arg = i;
        }
    }
    if (arg > 0 && arg < k) {
        const double h = (b - a) / k;
        m = std::min(m, golden_min(f, a + (arg - 1) * h, a + (arg + 1) * h, 40));
    }
    return m;
}

double subscan_max(const std::function<double(double)>& f, double a, double b, int k) {
    auto neg = [&](double x) { return -f(x); };
    return -subscan_min(neg, a, b, k);
}

}  // namespace

struct CriterionProfile::Impl {
    Measure mu;
    double alpha;
    int d;
    ProfileOptions opts;

    double lam_ext;            // top of the tabulation grid
    std::vector<double> lam;   // grid in log-radius
    std::vector<double> v;     // V on the grid
    std::vector<double> gphi;  // V - (d+alpha) log(1+r)
    std::vector<double> pre_min_v, pre_max_v;
    std::vector<double> suf_min_gphi;    // golden-refined between grid points
    std::vector<double> gw, suf_min_gw;  // W_delta scan for the default delta
    double v0, phi0, vmin;
    bool gphi_increasing_top = false;
    bool gw_increasing_top = false;

    // suffix minima of tabulated values, refined around each interior argmin
    static std::vector<double> refined_suffix_min(
        const std::vector<double>& grid, const std::vector<double>& vals,
        const std::function<double(double)>& f) {
        const int n = static_cast<int>(vals.size());
        std::vector<int> arg(n);
        std::vector<double> out(n);
        double m = kInf;
        int mj = n - 1;
        for (int i = n - 1; i >= 0; --i) {
            if (vals[i] < m) {
                m = vals[i];
                mj = i;
            }
            arg[i] = mj;
            out[i] = m;
        }
        // one golden pass per distinct argmin bracket
        std::vector<double> refined(n, kInf);
        for (int i = 0; i < n; ++i) {
            const int j = arg[i];
            if (refined[j] == kInf) {
                const double a = grid[std::max(0, j - 1)];
                const double b = grid[std::min(n - 1, j + 1)];
                refined[j] = a < b ? golden_min(f, a, b, 50) : vals[j];
            }
            out[i] = std::min(out[i], refined[j]);
        }
        return out;
    }

    Impl(Measure m, double a, ProfileOptions o) : mu(std::move(m)), alpha(a), opts(o) {
        if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("alpha must lie in (0,2)");
        d = mu.dim();
        lam_ext = std::log(opts.scan_rmax) + 30.0;
        const int n = std::max(64, opts.tab_points);
        lam.resize(n);
        v.resize(n);
        gphi.resize(n);
        const auto& pot = mu.potential();
        for (int i = 0; i < n; ++i) {
            lam[i] = kLamMin + (lam_ext - kLamMin) * i / (n - 1);
            v[i] = pot.radial_logr(lam[i]);
            gphi[i] = v[i] - (d + alpha) * log1p_r(lam[i]);
        }
        v0 = pot.radial(0.0);
        pre_min_v.resize(n);
        pre_max_v.resize(n);
        suf_min_gphi.resize(n);
        double mn = v0, mx = v0;
        for (int i = 0; i < n; ++i) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
            pre_min_v[i] = mn;
            pre_max_v[i] = mx;
        }
        suf_min_gphi = refined_suffix_min(lam, gphi,
                                          [this](double l) { return gphi_at(l); });
        phi0 = std::min(v0, suf_min_gphi[0]);
        vmin = std::min(v0, pre_min_v[n - 1]);

        // is g still climbing over the last quarter of the grid?
        int q = 3 * n / 4;
        gphi_increasing_top = true;
        for (int i = q; i + 8 < n; i += 8)
            if (gphi[i + 8] < gphi[i]) gphi_increasing_top = false;

        gw.resize(n);
        for (int i = 0; i < n; ++i) gw[i] = w_pointwise(std::exp(lam[i]), opts.delta);
        const double dd = opts.delta;
        suf_min_gw = refined_suffix_min(lam, gw,
                                        [this, dd](double l) { return gw_at(l, dd); });
        gw_increasing_top = true;
        for (int i = q; i + 8 < n; i += 8)
            if (gw[i + 8] < gw[i]) gw_increasing_top = false;
    }

    double v_at(double lamx) const { return mu.potential().radial_logr(lamx); }
    double gphi_at(double lamx) const {
        return v_at(lamx) - (d + alpha) * log1p_r(lamx);
    }
    double w_pointwise(double r, double delta) const {
        const auto& pot = mu.potential();
        return delta * pot.radial_grad_sq(r) - pot.radial_lapl(r);
    }
    double gw_at(double lamx, double delta) const {
        return w_pointwise(std::exp(lamx), delta);
    }

    // index of the last grid point <= lamx (requires lamx >= lam[0])
    int floor_idx(double lamx) const {
        auto it = std::upper_bound(lam.begin(), lam.end(), lamx);
        return static_cast<int>(it - lam.begin()) - 1;
    }

    double ball_min_v(double lamx) const {
        auto f = [this](double l) { return v_at(l); };
        if (lamx < lam[0]) return std::min(v0, subscan_min(f, lamx - 2.0, lamx, 8));
        int i = floor_idx(lamx);
        double m = std::min(v0, pre_min_v[i]);
        if (lamx > lam[i]) m = std::min(m, subscan_min(f, lam[i], lamx, 16));
        return m;
    }

    double ball_max_v(double lamx) const {
        auto f = [this](double l) { return v_at(l); };
        if (lamx < lam[0]) return std::max(v0, subscan_max(f, lamx - 2.0, lamx, 8));
        int i = floor_idx(lamx);
        double m = std::max(v0, pre_max_v[i]);
        if (lamx > lam[i]) m = std::max(m, subscan_max(f, lam[i], lamx, 16));
        return m;
    }

    double phi_at(double lamx) const {
        auto f = [this](double l) { return gphi_at(l); };
        if (lamx <= lam[0])
            return std::min(subscan_min(f, std::max(lamx, kLamFloor), lam[0], 16),
                            suf_min_gphi[0]);
        if (lamx >= lam.back()) return subscan_min(f, lamx, lamx + 10.0, 32);
        int i = floor_idx(lamx);
        double m = suf_min_gphi[i + 1];
        m = std::min(m, subscan_min(f, lamx, lam[i + 1], 16));
        return m;
    }

    double w_at(double lamx, double delta) const {
        auto f = [this, delta](double l) { return gw_at(l, delta); };
        const bool cached = delta == opts.delta;
        if (lamx <= lam[0]) {
            double base = cached ? suf_min_gw[0] : subscan_min(f, lam[0], lam.back(), 256);
            return std::min(subscan_min(f, std::max(lamx, kLamFloor), lam[0], 16), base);
        }
        if (lamx >= lam.back()) return subscan_min(f, lamx, lamx + 10.0, 32);
        int i = floor_idx(lamx);
        double suffix;
        if (cached) {
            suffix = suf_min_gw[i + 1];
        } else {
            suffix = kInf;
            for (std::size_t j = i + 1; j < lam.size(); ++j)
                suffix = std::min(suffix, f(lam[j]));
        }
        return std::min(suffix, subscan_min(f, lamx, lam[i + 1], 16));
    }

    // generalized inverse of a nondecreasing evaluator; returns the smallest
    // lam with eval(lam) >= y, to absolute tolerance tol in lam.
    double generalized_inverse(const std::function<double(double)>& eval, double y,
                               double value_at_floor, bool increasing_top) const {
        if (value_at_floor >= y) return -kInf;
        double lo = kLamFloor, hi = lam.back();
        if (eval(hi) < y) {
            if (!increasing_top) return kInf;  // bounded on the scan horizon
            double step = std::max(1.0, hi * 0.5);
            for (;;) {
                lo = hi;
                hi += step;
                step *= 2.0;
                if (hi > opts.lambda_cap) return kInf;
                if (eval(hi) >= y) break;
            }
        }
        const double tol = std::max(1e-12, opts.inv_rel_tol);
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            (eval(mid) >= y ? hi : lo) = mid;
        }
        return hi;
    }
};

CriterionProfile::CriterionProfile(Measure mu, double alpha, ProfileOptions opts)
    : impl_(std::make_shared<Impl>(std::move(mu), alpha, opts)) {}

CriterionProfile build_profile(const Measure& mu, double alpha, ProfileOptions opts) {
    return CriterionProfile(mu, alpha, opts);
}

const Measure& CriterionProfile::measure() const { return impl_->mu; }
double CriterionProfile::alpha() const { return impl_->alpha; }
int CriterionProfile::dim() const { return impl_->d; }
const ProfileOptions& CriterionProfile::options() const { return impl_->opts; }
double CriterionProfile::min_V() const { return impl_->vmin; }

double CriterionProfile::log_h_logr(double lamx) const {
    if (lamx == -kInf) return impl_->v0;
    return impl_->ball_min_v(lamx);
}
double CriterionProfile::log_H_logr(double lamx) const {
    if (lamx == -kInf) return impl_->v0;
    return impl_->ball_max_v(lamx);
}
double CriterionProfile::log_Phi_logr(double lamx) const {
    if (lamx == -kInf) return phi0_log();
    return impl_->phi_at(lamx);
}
double CriterionProfile::log_h(double r) const {
    return r <= 0.0 ? impl_->v0 : log_h_logr(std::log(r));
}
double CriterionProfile::log_H(double r) const {
    return r <= 0.0 ? impl_->v0 : log_H_logr(std::log(r));
}
double CriterionProfile::log_Phi(double r) const {
    return r <= 0.0 ? phi0_log() : log_Phi_logr(std::log(r));
}
double CriterionProfile::Phi(double r) const { return std::exp(log_Phi(r)); }
double CriterionProfile::phi0_log() const { return impl_->phi0; }

double CriterionProfile::phi_inv_logr(double log_y) const {
    auto eval = [this](double l) { return impl_->phi_at(l); };
    return impl_->generalized_inverse(eval, log_y, impl_->phi0,
                                      impl_->gphi_increasing_top);
}

bool CriterionProfile::phi_unbounded() const {
    const double two_dec = std::log(100.0);
    const double top = impl_->phi_at(impl_->lam.back());
    const double prev = impl_->phi_at(impl_->lam.back() - two_dec);
    const double base = impl_->phi_at(0.0);
    return impl_->gphi_increasing_top && (top - prev) > std::log(1.02) &&
           (top - base) > std::log(1.5);
}

double CriterionProfile::log_psi1_logr(double lamx) const {
    // sup over the ball of (1+|x|)^{d+alpha} e^{-V} is the prefix max of -gphi
    auto neg = [this](double l) { return -impl_->gphi_at(l); };
    double f1;
    if (lamx == -kInf || lamx < impl_->lam[0]) {
        f1 = std::max(-impl_->v0, lamx == -kInf ? -kInf : neg(lamx));
    } else {
        int i = impl_->floor_idx(lamx);
        f1 = -impl_->v0;
        for (int j = 0; j <= i; ++j) f1 = std::max(f1, -impl_->gphi[j]);
        if (lamx > impl_->lam[i]) f1 = std::max(f1, subscan_max(neg, impl_->lam[i], lamx, 16));
    }
    // global sup of gphi; diverging scans mean Psi1 = +inf
    double f2 = impl_->v0;  // r = 0 value of gphi
    std::size_t arg = 0;
    for (std::size_t j = 0; j < impl_->gphi.size(); ++j)
        if (impl_->gphi[j] > f2) {
            f2 = impl_->gphi[j];
            arg = j;
        }
    if (impl_->gphi_increasing_top && arg + 2 >= impl_->gphi.size()) return kInf;
    return f1 + f2;
}
double CriterionProfile::log_psi1(double r) const {
    return log_psi1_logr(r <= 0.0 ? -kInf : std::log(r));
}

namespace {

// log of \int_0^{R} |y -+ s|^{d+alpha} e^{-2V} dy for d = 1 (two kernel legs),
// or the d >= 2 angular reduction; everything in logs so R ~ e^{1e5} works.
double log_psi2_inner(const Measure& mu, double alpha, double lam_R, double lam_s) {
    const auto& pot = mu.potential();
    const int d = mu.dim();
    const double p = d + alpha;

    std::function<double(double)> log_f;
    if (d == 1) {
        log_f = [&pot, p, lam_s](double lam_y) {
            double leg1 = lam_s == -kInf ? p * lam_y
                                         : p * log_abs_exp_diff(lam_y, lam_s);
            double leg2 =
                lam_s == -kInf
                    ? p * lam_y
                    : p * (std::max(lam_y, lam_s) +
                           std::log1p(std::exp(-std::abs(lam_y - lam_s))));
            double base = -2.0 * pot.radial_logr(lam_y);
            double hi = std::max(leg1, leg2);
            if (hi == -kInf) return -kInf;
            return base + hi + std::log1p(std::exp(std::min(leg1, leg2) - hi));
        };
    } else {
        if (lam_R > 300.0)
            throw InvalidParam("psi2 for d >= 2 restricted to moderate radii");
        // midpoint rule in the polar angle; |y - s e1|^2 = m^2 (1 + q^2 - 2 q cos)
        static const int K = 96;
        const double log_sphere = std::log(sphere_area(d - 1));
        log_f = [&pot, p, lam_s, d, log_sphere](double lam_y) {
            const double m = std::max(lam_y, lam_s == -kInf ? lam_y : lam_s);
            const double q = lam_s == -kInf ? 0.0 : std::exp(-std::abs(lam_y - lam_s));
            double acc = -kInf;
            for (int i = 0; i < K; ++i) {
                const double th = M_PI * (i + 0.5) / K;
                const double w = M_PI / K * std::pow(std::sin(th), d - 2);
                const double ker =
                    0.5 * p * (2.0 * m + std::log(1.0 + q * q - 2.0 * q * std::cos(th)));
                const double term = std::log(w) + ker;
                acc = acc == -kInf ? term
                                   : std::max(acc, term) +
                                         std::log1p(std::exp(-std::abs(acc - term)));
            }
            return log_sphere + acc + (d - 1.0) * lam_y - 2.0 * pot.radial_logr(lam_y);
        };
    }

    // integrate over y in [0, R]: rho-space near 0, lambda-space beyond
    const double lam_split = std::min(lam_R, 1.0);
    auto log_f_rho = [&](double y) { return y <= 0.0 ? -kInf : log_f(std::log(y)); };
    double part1 = quad::log_integral(log_f_rho, 0.0, std::exp(lam_split));
    if (lam_R <= lam_split) return part1;
    auto log_f_lam = [&](double l) { return log_f(l) + l; };  // dy = e^lam dlam
    double part2 = quad::log_integral(log_f_lam, lam_split, lam_R);
    double hi = std::max(part1, part2);
    if (hi == -kInf) return -kInf;
    return hi + std::log1p(std::exp(std::min(part1, part2) - hi));
}

}  // namespace

double CriterionProfile::log_psi2_logr(double lam_R) const {
    const auto& mu = impl_->mu;
    const double ball = 1.0 - mu.tail_mass_logr(lam_R);
    if (!(ball > 0.0)) return kInf;
    const int n = std::max(3, impl_->opts.psi2_scan_points);
    double best = -kInf;
    for (int j = 0; j < n; ++j) {
        // s = R*j/(n-1); in logs to survive huge R
        double lam_s = j == 0 ? -kInf
                              : lam_R + std::log(static_cast<double>(j) / (n - 1));
        best = std::max(best, log_psi2_inner(mu, impl_->alpha, lam_R, lam_s));
    }
    return best - 2.0 * std::log(ball);
}
double CriterionProfile::log_psi2(double r) const {
    if (r <= 0.0) throw InvalidParam("psi2 requires r > 0");
    return log_psi2_logr(std::log(r));
}

double CriterionProfile::w_delta(double r, double delta) const {
    return impl_->w_at(r <= 0.0 ? -kInf : std::log(r), delta);
}

double CriterionProfile::w_delta_inv_logr(double y, double delta) const {
    auto eval = [this, delta](double l) { return impl_->w_at(l, delta); };
    const double floor_val = impl_->w_at(kLamFloor, delta);
    const bool top = delta == impl_->opts.delta ? impl_->gw_increasing_top : true;
    return impl_->generalized_inverse(eval, y, floor_val, top);
}

bool CriterionProfile::ef_holds(double delta) const {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParam("delta must lie in (0,1)");
    const double two_dec = std::log(100.0);
    const double top = impl_->w_at(impl_->lam.back(), delta);
    const double prev = impl_->w_at(impl_->lam.back() - two_dec, delta);
    return top > 10.0 && (top - prev) > std::max(1.0, 0.05 * std::abs(top));
}

double CriterionProfile::U_logr(double r) const {
    if (!(r > 0.0)) throw InvalidParam("U requires r > 0");
    const auto& mu = impl_->mu;
    const double target = r / (1.0 + r);
    double lo = -14.0;
    if (mu.tail_mass_logr(lo) <= target) {
        // U is tiny; bisect further down
        double lo2 = kLamFloor;
        double hi2 = lo;
        while (hi2 - lo2 > 1e-10) {
            double mid = 0.5 * (lo2 + hi2);
            (mu.tail_mass_logr(mid) <= target ? hi2 : lo2) = mid;
        }
        return hi2;
    }
    double hi = 2.0, step = 4.0;
    while (mu.tail_mass_logr(hi) > target) {
        lo = hi;
        hi += step;
        step *= 2.0;
        if (hi > impl_->opts.lambda_cap)
            throw QuadDiverged("U(r): tail mass never reached the target");
    }
    while (hi - lo > std::max(1e-12, impl_->opts.inv_rel_tol)) {
        double mid = 0.5 * (lo + hi);
        (mu.tail_mass_logr(mid) <= target ? hi : lo) = mid;
    }
    return hi;
}

double CriterionProfile::delta_V_logr(double lam) const { return log_H_logr(lam); }

// --- engines ---------------------------------------------------------------

double beta_super_t11_log(const CriterionProfile& p, double r, double c1, double c2) {
    if (!(r > 0.0)) throw InvalidParam("beta_super_t11: r must be positive");
    if (!p.phi_unbounded())
        throw CriterionInapplicable(
            "beta_super_t11: Phi is bounded on the probe grid; the super "
            "Poincare criterion needs Phi(r) -> infinity");
    const double d = p.dim(), a = p.alpha();
    const double lam_star = p.phi_inv_logr(std::log(c2) - std::log(r));
    if (lam_star == kInf)
        throw CriterionInapplicable("beta_super_t11: Phi^{-1}(c2/r) beyond the scan cap");
    const double lh = p.log_h_logr(lam_star);
    const double lH = p.log_H_logr(lam_star);
    const double term =
        -(d / a) * std::log(r) - (1.0 + d / a) * lh + (2.0 + d / a) * lH;
    return std::log(c1) + softplus(term);
}
double beta_super_t11(const CriterionProfile& p, double r, double c1, double c2) {
    return std::exp(beta_super_t11_log(p, r, c1, c2));
}

double beta_weak_t11_log(const CriterionProfile& p, double r, double c) {
    if (!(r > 0.0)) throw InvalidParam("beta_weak_t11: r must be positive");
    const double lam_u = p.U_logr(r);
    double best = kInf;
    const int k = 16;
    for (int i = 0; i <= k; ++i) {
        const double lam_R = lam_u + std::log(10.0) * i / k;
        const double b1 = std::log(c) + p.log_psi1_logr(lam_R);
        const double b2 = p.log_psi2_logr(lam_R);
        best = std::min(best, std::min(b1, b2));
    }
    return best;
}
double beta_weak_t11(const CriterionProfile& p, double r, double c) {
    return std::exp(beta_weak_t11_log(p, r, c));
}

double beta_super_t51_log(const CriterionProfile& p, double delta, double r, double c1,
                          double c2) {
    if (!(r > 0.0)) throw InvalidParam("beta_super_t51: r must be positive");
    if (!p.ef_holds(delta))
        throw CriterionInapplicable(
            "beta_super_t51: condition (EF) fails (delta|grad V|^2 - Delta V "
            "stays bounded)");
    if (p.min_V() < -1e-9)
        throw CriterionInapplicable("beta_super_t51 requires V >= 0");
    const double d = p.dim(), a = p.alpha();
    const double y = c2 * std::pow(r, -2.0 / a);
    const double lam_star = p.w_delta_inv_logr(y, delta);
    if (lam_star == kInf)
        throw CriterionInapplicable("beta_super_t51: W_delta^{-1} beyond the scan cap");
    const double lh = p.log_h_logr(lam_star);
    const double lH = p.log_H_logr(lam_star);
    const double term =
        -(d / a) * std::log(r) + (2.0 + 0.5 * d) * lH - (1.0 + 0.5 * d) * lh;
    return std::log(c1) + softplus(term);
}
double beta_super_t51(const CriterionProfile& p, double delta, double r, double c1,
                      double c2) {
    return std::exp(beta_super_t51_log(p, delta, r, c1, c2));
}

double beta_weak_t52_log(const CriterionProfile& p, double r, double c1, double c2) {
    if (!(r > 0.0)) throw InvalidParam("beta_weak_t52: r must be positive");
    const double a = p.alpha();
    const double lam_u = p.U_logr(c2 * std::pow(r, 0.5 * a));
    return std::log(c1) + 2.0 * lam_u + 2.0 * p.delta_V_logr(lam_u);
}
double beta_weak_t52(const CriterionProfile& p, double r, double c1, double c2) {
    return std::exp(beta_weak_t52_log(p, r, c1, c2));
}

// --- curves ----------------------------------------------------------------

std::string rate_kind_name(RateKind k) {
    switch (k) {
        case RateKind::SuperBeta_T11: return "super_beta_t11";
        case RateKind::WeakBeta_T11: return "weak_beta_t11";
        case RateKind::SuperBeta_T51: return "super_beta_t51";
        case RateKind::WeakBeta_T52: return "weak_beta_t52";
        case RateKind::ClosedForm: return "closed_form";
    }
    return "?";
}

double RateCurve::value(std::size_t i) const { return std::exp(samples[i].log_value); }
double RateCurve::r_min() const { return samples.front().r; }
double RateCurve::r_max() const { return samples.back().r; }

double RateCurve::log_at(double r) const {
    if (samples.empty()) throw InvalidParam("empty curve");
    const double lr = std::log(r);
    if (r <= samples.front().r) return samples.front().log_value;
    if (r >= samples.back().r) return samples.back().log_value;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].r >= r) {
            const double l0 = std::log(samples[i - 1].r), l1 = std::log(samples[i].r);
            const double t = (lr - l0) / (l1 - l0);
            return samples[i - 1].log_value +
                   t * (samples[i].log_value - samples[i - 1].log_value);
        }
    }
    return samples.back().log_value;
}

namespace {

void finish_curve(RateCurve& c, bool monotone_regularize) {
    if (monotone_regularize) {
        for (int i = static_cast<int>(c.samples.size()) - 2; i >= 0; --i)
            c.samples[i].log_value =
                std::max(c.samples[i].log_value, c.samples[i + 1].log_value);
    }
    std::vector<double> lx, ly;
    for (const auto& s : c.samples) {
        if (std::isfinite(s.log_value)) {
            lx.push_back(std::log(s.r));
            ly.push_back(s.log_value);
        }
    }
    if (lx.size() >= 2) c.loglog_fit = fit_linear(lx, ly);
}

}  // namespace

RateCurve sample_engine_curve(RateKind kind, const CriterionProfile& p, double r_lo,
                              double r_hi, int n, const RateConstants& k) {
    if (!(r_lo > 0.0 && r_hi > r_lo && n >= 2)) throw InvalidParam("bad curve window");
    RateCurve c;
    c.kind = kind;
    c.label = rate_kind_name(kind);
    for (int i = 0; i < n; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1));
        double lv = 0.0;
        switch (kind) {
            case RateKind::SuperBeta_T11: lv = beta_super_t11_log(p, r, k.c1, k.c2); break;
            case RateKind::WeakBeta_T11: lv = beta_weak_t11_log(p, r, k.c); break;
            case RateKind::SuperBeta_T51:
                lv = beta_super_t51_log(p, k.delta, r, k.c1, k.c2);
                break;
            case RateKind::WeakBeta_T52: lv = beta_weak_t52_log(p, r, k.c1, k.c2); break;
            case RateKind::ClosedForm: throw InvalidParam("use closed_form_curve");
        }
        c.samples.push_back({r, lv});
    }
    const bool super =
        kind == RateKind::SuperBeta_T11 || kind == RateKind::SuperBeta_T51;
    finish_curve(c, super);
    return c;
}

RateCurve closed_form_curve(CorollaryId id, const CorollaryParams& p, double r_lo,
                            double r_hi, int n) {
    if (!(r_lo > 0.0 && r_hi > r_lo && n >= 2)) throw InvalidParam("bad curve window");
    const double d = p.d, a = p.alpha, e = p.eps;
    const double c = p.consts.c, c1 = p.consts.c1, c2 = p.consts.c2;
    if (!(a > 0.0 && a < 2.0)) throw InvalidParam("alpha must lie in (0,2)");

    std::function<double(double)> logf;
    std::string label;
    switch (id) {
        case CorollaryId::C12_Super: {
            if (!(e > a)) throw InvalidParam("Cor 1.2(2) closed form requires eps > alpha");
            const double q = d / a + (d + e) * (2.0 * a + d) / (a * (e - a));
            logf = [=](double r) { return std::log(c) + softplus(-q * std::log(r)); };
            label = "cor12_super";
            break;
        }
        case CorollaryId::C12_Weak: {
            if (!(e > 0.0 && e < a))
                throw InvalidParam("Cor 1.2(3) closed form requires 0 < eps < alpha");
            const double q = (a - e) / e;
            logf = [=](double r) { return std::log(c) + softplus(-q * std::log(r)); };
            label = "cor12_weak";
            break;
        }
        case CorollaryId::C13_Super: {
            if (!(e > 0.0)) throw InvalidParam("Cor 1.3(1) closed form requires eps > 0");
            logf = [=](double r) { return c * (1.0 + std::pow(r, -1.0 / e)); };
            label = "cor13_super";
            break;
        }
        case CorollaryId::C13_LS: {
            if (!(e >= 1.0))
                throw InvalidParam("Cor 1.3(3): the log-Sobolev rate requires eps >= 1");
            logf = [=](double r) { return c * (1.0 + 1.0 / r); };
            label = "cor13_log_sobolev";
            break;
        }
        case CorollaryId::C13_Weak: {
            if (!(e < 0.0)) throw InvalidParam("Cor 1.3(4) closed form requires eps < 0");
            logf = [=](double r) {
                return std::log(c) + std::log1p(std::pow(std::log1p(1.0 / r), -e));
            };
            label = "cor13_weak";
            break;
        }
        case CorollaryId::C14_Weak: {
            if (!(e > 1.0)) throw InvalidParam("Cor 1.4 closed form requires eps > 1");
            logf = [=](double r) {
                return std::log(c1) + c2 * std::pow(r, -1.0 / (e - 1.0));
            };
            label = "cor14_weak";
            break;
        }
        case CorollaryId::C15_1_Super: {
            if (!(e > 0.0)) throw InvalidParam("Cor 1.5(1) closed form requires eps > 0");
            logf = [=](double r) {
                const double A = -(2.0 * (a + d) / a) * std::log(r) +
                                 c * std::pow(std::log1p(1.0 / r), 1.0 / (1.0 + e));
                return std::log(c) + softplus(A);
            };
            label = "cor15_1_super";
            break;
        }
        case CorollaryId::C15_2_Super: {
            if (!(e > 0.0)) throw InvalidParam("Cor 1.5(2) closed form requires eps > 0");
            logf = [=](double r) {
                const double A =
                    -(2.0 * (a + d) / a) * std::log(r) +
                    ((2.0 * a + d) * (d + a) / (2.0 * e * a)) *
                        std::log(std::log1p(1.0 / r));
                return std::log(c) + softplus(A);
            };
            label = "cor15_2_super";
            break;
        }
        case CorollaryId::T51_SubGauss: {
            if (!(e > 0.5)) throw InvalidParam("Theorem 5.1 rate requires eps > 1/2");
            logf = [=](double r) {
                return c * (1.0 + std::pow(r, -2.0 * e / (a * (2.0 * e - 1.0))));
            };
            label = "t51_subgaussian";
            break;
        }
    }

    RateCurve curve;
    curve.kind = RateKind::ClosedForm;
    curve.label = label;
    for (int i = 0; i < n; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1));
        curve.samples.push_back({r, logf(r)});
    }
    finish_curve(curve, false);
    return curve;
}

SlopeFit fit_growth(const RateCurve& c, GrowthFunctional g, double r_lo, double r_hi) {
    std::vector<double> xs, ys;
    for (const auto& s : c.samples) {
        if (s.r < r_lo || s.r > r_hi) continue;
        double y = s.log_value;
        if (g == GrowthFunctional::LogLogVsLogR) {
            if (!(y > 0.0)) continue;
            y = std::log(y);
        }
        if (!std::isfinite(y)) continue;
        xs.push_back(std::log(s.r));
        ys.push_back(y);
    }
    return fit_linear(xs, ys);
}

CompareResult compare_curves(const RateCurve& a, const RateCurve& b, double r_lo,
                             double r_hi, GrowthFunctional g) {
    CompareResult res;
    res.window_lo = std::max({a.r_min(), b.r_min(), r_lo});
    res.window_hi = std::min({a.r_max(), b.r_max(), r_hi});
    if (!(res.window_lo < res.window_hi))
        throw DisjointWindows("compare_curves: the r-windows do not overlap");
    SlopeFit fa = fit_growth(a, g, res.window_lo, res.window_hi);
    SlopeFit fb = fit_growth(b, g, res.window_lo, res.window_hi);
    res.slope_a = fa.slope;
    res.slope_b = fb.slope;
    res.slope_diff = fa.slope - fb.slope;
    for (const auto& s : a.samples) {
        if (s.r < res.window_lo || s.r > res.window_hi) continue;
        const double diff = std::abs(s.log_value - b.log_at(s.r));
        if (std::isfinite(diff)) res.max_log_ratio = std::max(res.max_log_ratio, diff);
    }
    return res;
}

}  // namespace stableform
