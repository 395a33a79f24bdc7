#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace stableform {
namespace quad {

using Fn = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-13;
    long max_evals = 4'000'000;
    int max_depth = 52;
    int min_segments = 8;  // initial uniform split of the adaptive heap
};

// value with an a-posteriori error estimate; est_error comes from the
// Gauss/Kronrod discrepancy or from panel-doubling Richardson comparison.
struct QuadResult {
    double value = 0.0;
    double est_error = 0.0;
    long panels_used = 0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        est_error += o.est_error;
        panels_used += o.panels_used;
        converged = converged && o.converged;
        return *this;
    }
};

// Globally adaptive Gauss-Kronrod 15(7) on [a, b].
QuadResult adaptive(const Fn& f, double a, double b, const QuadOptions& opts = {});

// Composite 7-point Gauss-Legendre with panel doubling until the result is
// stable; est_error is the last doubling difference.
QuadResult panel_doubling(const Fn& f, double a, double b, int panels0 = 8,
                          const QuadOptions& opts = {});

// \int_{z0}^\infty f(z) dz through z = z0 / (1-u)^k, for integrands with a
// power tail f ~ z^{-p}, p > 1 (pick k so that k(p-1) >= 3).
QuadResult integrate_power_tail(const Fn& f, double z0, double k = 8.0,
                                const QuadOptions& opts = {});

// \int_{lam0}^\infty f(lam) dlam through lam = lam0 + expm1(u/(1-u)).
// Handles integrands decaying exponentially or like lam^{-p}, p > 1, in lam;
// fails to converge (converged=false) when the integral diverges.
QuadResult integrate_exp_tail(const Fn& f, double lam0, const QuadOptions& opts = {});

// log of \int_a^b exp(log_f(x)) dx, computed with a max shift so the result
// is usable when the integral value itself over/underflows.
// Returns -inf for a vanishing integral.
double log_integral(const Fn& log_f, double a, double b, const QuadOptions& opts = {});

}  // namespace quad
}  // namespace stableform
