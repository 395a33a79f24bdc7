#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stableform/potential.hpp"
#include "stableform/slope.hpp"

namespace stableform {

struct ProfileOptions {
    int tab_points = 512;        // log-spaced tabulation behind the inverses
    double scan_rmax = 1e8;      // finite-scan horizon for inf/sup over |x| >= r
    double lambda_cap = 1e15;    // generalized inverses give up beyond e^cap
    double inv_rel_tol = 1e-10;  // relative tolerance (in the radius) of inverses
    double delta = 0.5;          // default delta of W_delta
    int psi2_scan_points = 65;   // radial grid carrying Psi2's sup over the ball
};

// All scalar criterion functions attached to one (V, alpha, d):
//   h(r)    = inf_{|x|<=r} e^V          (log_h returns log h)
//   H(r)    = sup_{|x|<=r} e^V
//   Phi(r)  = inf_{|x|>=r} e^V / (1+|x|)^{d+alpha}
//   Phi^{-1}(y) = inf{s >= 0 : Phi(s) >= y},  inf empty = +inf
//   Psi1(r) = (sup_{|x|<=r} (1+|x|)^{d+alpha} e^{-V}) * sup_x e^V/(1+|x|)^{d+alpha}
//   Psi2(r) = mu(B_r)^{-2} sup_{x in B_r} \int_{B_r} |y-x|^{d+alpha} e^{-2V(y)} dy
//   W_delta(r) = inf_{|x|>=r} (delta |grad V|^2 - Delta V)
//   U(r)    = inf{s : mu(|x|>s) <= r/(1+r)}
//   delta_r(V) = sup_{|x|<=r} V
//
// Everything is computed and exposed in logs of the value and (where the
// radius can be astronomically large) logs of the radius, so the heavy-tail
// asymptotics stay representable.
class CriterionProfile {
  public:
    CriterionProfile(Measure mu, double alpha, ProfileOptions opts = {});

    const Measure& measure() const;
    double alpha() const;
    int dim() const;
    const ProfileOptions& options() const;

    double log_h(double r) const;
    double log_H(double r) const;
    double log_Phi(double r) const;
    double log_h_logr(double lam) const;  // lam = log r; -inf means r = 0
    double log_H_logr(double lam) const;
    double log_Phi_logr(double lam) const;
    double phi0_log() const;  // log Phi(0)

    double Phi(double r) const;  // plain value, for the Lyapunov ratio

    // smallest log-radius with log Phi >= log_y; -inf when Phi(0) already
    // qualifies, +inf when nothing below the cap does.
    double phi_inv_logr(double log_y) const;
    bool phi_unbounded() const;

    double log_psi1(double r) const;        // +inf when the global sup diverges
    double log_psi1_logr(double lam) const;
    double log_psi2(double r) const;
    double log_psi2_logr(double lam) const;

    double w_delta(double r, double delta) const;
    double w_delta_inv_logr(double y, double delta) const;
    bool ef_holds(double delta) const;

    double U_logr(double r) const;          // log of U(r)
    double delta_V_logr(double lam) const;  // sup_{|x|<=e^lam} V

    double min_V() const;  // over the scan grid; t51 requires V >= 0

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

CriterionProfile build_profile(const Measure& mu, double alpha, ProfileOptions opts = {});

// --- rate engines ---------------------------------------------------------
// log-variants return log beta(r) (beta can overflow a double); plain
// variants exponentiate and may return +inf.

double beta_super_t11_log(const CriterionProfile&, double r, double c1 = 1.0,
                          double c2 = 1.0);
double beta_super_t11(const CriterionProfile&, double r, double c1 = 1.0, double c2 = 1.0);

double beta_weak_t11_log(const CriterionProfile&, double r, double c = 1.0);
double beta_weak_t11(const CriterionProfile&, double r, double c = 1.0);

double beta_super_t51_log(const CriterionProfile&, double delta, double r, double c1 = 1.0,
                          double c2 = 1.0);
double beta_super_t51(const CriterionProfile&, double delta, double r, double c1 = 1.0,
                      double c2 = 1.0);

double beta_weak_t52_log(const CriterionProfile&, double r, double c1 = 1.0,
                         double c2 = 1.0);
double beta_weak_t52(const CriterionProfile&, double r, double c1 = 1.0, double c2 = 1.0);

// --- sampled curves -------------------------------------------------------

enum class RateKind { SuperBeta_T11, WeakBeta_T11, SuperBeta_T51, WeakBeta_T52, ClosedForm };

std::string rate_kind_name(RateKind k);

struct RateSample {
    double r;
    double log_value;
};

struct RateCurve {
    RateKind kind = RateKind::ClosedForm;
    std::string label;
    std::vector<RateSample> samples;  // increasing in r
    SlopeFit loglog_fit;              // log value vs log r over the whole window
    bool frozen_at_top = true;        // nonincreasing regularization applied at
                                      // the largest sampled r (Super kinds)

    double value(std::size_t i) const;
    double log_at(double r) const;  // linear interpolation in (log r, log value)
    double r_min() const;
    double r_max() const;
};

struct RateConstants {
    double c1 = 1.0;
    double c2 = 1.0;
    double c = 1.0;
    double delta = 0.5;  // t51 only
};

RateCurve sample_engine_curve(RateKind kind, const CriterionProfile&, double r_lo,
                              double r_hi, int n, const RateConstants& = {});

enum class CorollaryId {
    C12_Super,    // beta = c (1 + r^{-d/a - (d+e)(2a+d)/(a(e-a))}),    e > a
    C12_Weak,     // beta~ = c (1 + r^{-(a-e)/e}),                      0 < e < a
    C13_Super,    // beta = exp(c (1 + r^{-1/e})),                      e > 0
    C13_LS,       // beta = exp(c (1 + 1/r)), the log-Sobolev rate,     e >= 1
    C13_Weak,     // beta~ = c (1 + log^{-e}(1 + 1/r)),                 e < 0
    C14_Weak,     // beta~ = c1 exp(c2 r^{-1/(e-1)}),                   e > 1
    C15_1_Super,  // beta = c + c r^{-2(a+d)/a} exp(c log^{1/(1+e)}(1+1/r)), e > 0
    C15_2_Super,  // beta = c (1 + r^{-2(a+d)/a} log^{(2a+d)(d+a)/(2ea)}(1+1/r)), e > 0
    T51_SubGauss  // beta = exp(c (1 + r^{-2e/(a(2e-1))})),             e > 1/2
};

struct CorollaryParams {
    int d = 1;
    double alpha = 1.0;
    double eps = 1.0;
    RateConstants consts;
};

// Samples the corollary's printed closed form; InvalidParam outside validity.
RateCurve closed_form_curve(CorollaryId id, const CorollaryParams& p, double r_lo,
                            double r_hi, int n);

// slope of log(value) vs log(r)   -- power-law rates
// slope of log(log value) vs log(r) -- exponential rates
enum class GrowthFunctional { LogVsLogR, LogLogVsLogR };

SlopeFit fit_growth(const RateCurve&, GrowthFunctional, double r_lo, double r_hi);

struct CompareResult {
    double slope_a = 0.0, slope_b = 0.0;
    double slope_diff = 0.0;
    double max_log_ratio = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

// Slope difference and max |log a - log b| over the overlap of the two
// windows intersected with [r_lo, r_hi]; DisjointWindows when empty.
CompareResult compare_curves(const RateCurve& a, const RateCurve& b, double r_lo,
                             double r_hi, GrowthFunctional = GrowthFunctional::LogVsLogR);

}  // namespace stableform
