#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace stableform {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^u), overflow-safe.
inline double softplus(double u) {
    if (u > 36.0) return u + std::exp(-u);
    if (u < -36.0) return std::exp(u);
    return std::log1p(std::exp(u));
}

// log(1 + r^2) for r = e^lam.
inline double log1p_r2(double lam) { return softplus(2.0 * lam); }

// log(e + r^2) for r = e^lam.
inline double log_e_plus_r2(double lam) { return 1.0 + softplus(2.0 * lam - 1.0); }

// log(1 + r) for r = e^lam.
inline double log1p_r(double lam) { return softplus(lam); }

// Quintic smoothstep on [0,1]: S(0)=0, S(1)=1, S'=S''=0 at both ends.
inline double smoothstep5(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return std::min(1.0, u * u * u * (10.0 + u * (-15.0 + 6.0 * u)));
}

inline double smoothstep5_d(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 30.0 * u * u * (1.0 - u) * (1.0 - u);  // max 15/8 at u = 1/2
}

// \int_0^u S(t) dt for the quintic smoothstep.
inline double smoothstep5_int(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 0.5 + (u - 1.0);
    const double u4 = u * u * u * u;
    return u4 * (2.5 + u * (-3.0 + u));
}

// Surface area of the unit sphere S^{d-1} in R^d (2 for d = 1).
inline double sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

// log |e^a - e^b|, stable for large arguments; -inf when a == b.
inline double log_abs_exp_diff(double a, double b) {
    const double hi = std::max(a, b), lo = std::min(a, b);
    if (hi == lo) return -kInf;
    const double d = lo - hi;  // <= 0
    return hi + std::log1p(-std::exp(d));
}

// FNV-1a 64-bit, used to fingerprint configs in reports.
inline unsigned long long fnv1a64(const char* data, std::size_t len) {
    unsigned long long h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace stableform
