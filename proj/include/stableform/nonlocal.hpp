#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stableform/potential.hpp"
#include "stableform/quadrature.hpp"
#include "stableform/testfunction.hpp"

namespace stableform {
namespace nonlocal {

// Numerics are specialized to d = 1: every integral below is over the line.
struct NonlocalOptions {
    double rel_tol = 1e-9;
    int inner_panels0 = 16;  // starting panel count of the graded inner mesh
    double cutoff = 1.0;     // compensation radius of the generator split
    long max_evals = 4'000'000;
};

// Gamma(f,f)(x) = \int (f(y)-f(x))^2 / |y-x|^{1+alpha} dy.
// Throws QuadDiverged when panel doubling fails to settle.
quad::QuadResult carre(const TestFunction& f, double x, double alpha,
                       const NonlocalOptions& = {});

// E_{alpha,V}(f,g) = \iint (f(x)-f(y))(g(x)-g(y)) |x-y|^{-1-alpha} dy dmu(x).
quad::QuadResult dirichlet_form(const TestFunction& f, const TestFunction& g,
                                const Measure& mu, double alpha,
                                const NonlocalOptions& = {});

// The explicit compensated generator
//   L f(x) = \int (f(x+z)-f(x)-f'(x) z 1_{|z|<=c}) (1+e^{V(x)-V(x+z)}) |z|^{-1-alpha} dz
//          + \int_{|z|<=c} f'(x) z (e^{V(x)-V(x+z)}-1) |z|^{-1-alpha} dz
// with both pieces compensated so the integrands are O(|z|^{1-alpha}) near 0.
quad::QuadResult generator_apply(const TestFunction& f, const Potential& V, double x,
                                 double alpha, const NonlocalOptions& = {});

// The Lyapunov function: phi(x) = 1 + |x|^{alpha0} for |x| >= 1, constant near
// the origin, blended with a quintic smoothstep on [1/2, 1] (C^2 overall).
TestFunction lyapunov_phi(double alpha0);

struct LyapunovRow {
    double x;
    double l_phi;       // L phi(x)
    double l_phi_err;   // quadrature error estimate
    double capital_phi; // Phi(|x|) from the criterion profile
    double phi;         // phi(x)
    double ratio;       // -L phi / (Phi * phi)
};

struct LyapunovReport {
    std::vector<LyapunovRow> rows;    // sorted by |x|
    double alpha0 = 0.0;
    double inf_ratio_tail = 0.0;      // inf of ratio over |x| >= r0_empirical
    double r0_empirical = 0.0;        // smallest grid radius past which ratio >= c1_threshold
    double sup_abs_lphi_inner = 0.0;  // sup |L phi| over |x| <= r0_empirical
    bool success = false;
    double c1_threshold = 0.0;
};

// Evaluates the drift ratio -L phi / (Phi(|x|) phi) on the grid; Phi comes
// from the caller (typically CriterionProfile::Phi).
LyapunovReport lyapunov_check(const Potential& V, double alpha, double alpha0,
                              std::span<const double> x_grid,
                              const std::function<double(double)>& Phi_of_r,
                              double c1_threshold = 0.01, const NonlocalOptions& = {});

}  // namespace nonlocal
}  // namespace stableform
