#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stableform {

// Scalar test function on R (the nonlocal numerics are 1-D) with enough
// metadata for the singular quadratures: an exact derivative, a local bound
// on |f''|, an optional interval outside which f is constant, and a growth
// certificate |f| <= C (1 + |x|^rho).
struct TestFunction {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> hess_bound;  // bound for |f''| on [x-1, x+1]
    std::optional<std::pair<double, double>> support_hint;
    double growth_C = 1.0;
    double growth_rho = 0.0;
    std::string name;

    double operator()(double x) const { return f(x); }
};

// C^2 bump ((1 - u^2)^3 with u = (x-c)/w), vanishing outside [c-w, c+w].
TestFunction bump(double center, double width);

// x near the origin, smoothly clamped to a constant outside [-1, 1].
TestFunction clamped_identity();

// constant function (edge cases)
TestFunction constant_fn(double value);

// bounded polynomial-decay profile  x^k / (1 + x^2)^m  with 2m >= k.
TestFunction poly_decay(int k, int m);

// tanh ramp of the given width (bounded, odd)
TestFunction tanh_ramp(double width);

// A fixed, deterministic family of bump / polynomial-decay / ramp functions
// used by the probe and inequality tests.
std::vector<TestFunction> canonical_family(int count);

}  // namespace stableform
