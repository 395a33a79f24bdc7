#include "stableform/testfunction.hpp"

#include <cmath>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"

namespace stableform {

TestFunction bump(double center, double width) {
    if (!(width > 0.0)) throw InvalidParam("bump width must be positive");
    TestFunction t;
    t.name = "bump(" + std::to_string(center) + "," + std::to_string(width) + ")";
    const double c = center, w = width;
    t.f = [c, w](double x) {
        const double u = (x - c) / w;
        if (std::abs(u) >= 1.0) return 0.0;
        const double s = 1.0 - u * u;
        return s * s * s;
    };
    t.df = [c, w](double x) {
        const double u = (x - c) / w;
        if (std::abs(u) >= 1.0) return 0.0;
        const double s = 1.0 - u * u;
        return -6.0 * u * s * s / w;
    };
    t.hess_bound = [w](double) { return 6.0 / (w * w) * 2.5; };
    t.support_hint = std::make_pair(c - w, c + w);
    t.growth_C = 1.0;
    t.growth_rho = 0.0;
    return t;
}

TestFunction clamped_identity() {
    // f' = 1 - S((|x|-a)/(b-a)) with the quintic smoothstep; odd in x
    const double a = 0.5, b = 1.0, w = b - a;
    TestFunction t;
    t.name = "clamped_identity";
    auto val = [a, w](double s) {  // s in [0, b)
        if (s <= a) return s;
        return s - w * smoothstep5_int((s - a) / w);
    };
    const double plateau = b - w * smoothstep5_int(1.0);
    t.f = [val, plateau, b](double x) {
        const double s = std::abs(x);
        double v = s >= b ? plateau : val(s);
        return x >= 0.0 ? v : -v;
    };
    t.df = [a, b, w](double x) {
        const double s = std::abs(x);
        if (s >= b) return 0.0;
        if (s <= a) return 1.0;
        return 1.0 - smoothstep5((s - a) / w);
    };
    t.hess_bound = [w](double) { return 1.875 / w; };
    t.support_hint = std::make_pair(-b, b);
    t.growth_C = 1.0;
    t.growth_rho = 0.0;
    return t;
}

TestFunction constant_fn(double value) {
    TestFunction t;
    t.name = "const(" + std::to_string(value) + ")";
    t.f = [value](double) { return value; };
    t.df = [](double) { return 0.0; };
    t.hess_bound = [](double) { return 0.0; };
    t.support_hint = std::make_pair(0.0, 0.0);
    t.growth_C = std::abs(value) + 1.0;
    t.growth_rho = 0.0;
    return t;
}

TestFunction poly_decay(int k, int m) {
    if (2 * m < k) throw InvalidParam("poly_decay needs 2m >= k to stay bounded");
    TestFunction t;
    t.name = "poly_decay(" + std::to_string(k) + "," + std::to_string(m) + ")";
    t.f = [k, m](double x) {
        return std::pow(x, k) / std::pow(1.0 + x * x, m);
    };
    t.df = [k, m](double x) {
        const double q = 1.0 + x * x;
        return (k * std::pow(x, k - 1) * q - 2.0 * m * std::pow(x, k + 1)) /
               std::pow(q, m + 1);
    };
    t.hess_bound = [k, m](double) { return 4.0 * (k + 1.0) * (m + 1.0) * (m + 2.0); };
    t.growth_C = 2.0;
    t.growth_rho = 0.0;
    return t;
}

TestFunction tanh_ramp(double width) {
    TestFunction t;
    t.name = "tanh_ramp(" + std::to_string(width) + ")";
    t.f = [width](double x) { return std::tanh(x / width); };
    t.df = [width](double x) {
        const double c = std::cosh(x / width);
        return 1.0 / (width * c * c);
    };
    t.hess_bound = [width](double) { return 0.8 / (width * width); };
    t.growth_C = 1.0;
    t.growth_rho = 0.0;
    return t;
}

std::vector<TestFunction> canonical_family(int count) {
    std::vector<TestFunction> out;
    out.push_back(bump(0.0, 2.0));
    out.push_back(bump(1.5, 1.0));
    out.push_back(bump(-2.0, 3.0));
    out.push_back(bump(0.5, 0.75));
    out.push_back(clamped_identity());
    out.push_back(poly_decay(0, 1));
    out.push_back(poly_decay(1, 1));
    out.push_back(poly_decay(2, 2));
    out.push_back(poly_decay(3, 2));
    out.push_back(tanh_ramp(1.0));
    out.push_back(tanh_ramp(3.0));
    out.push_back(bump(4.0, 2.5));
    if (count > static_cast<int>(out.size()))
        throw InvalidParam("canonical_family has at most 12 members");
    out.resize(count);
    return out;
}

}  // namespace stableform
