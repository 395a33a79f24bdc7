#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace stableform {

// Least-squares line y = slope*x + intercept with an RMS residual.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t points = 0;
};

SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log(y) against log(x), restricted to x in [x_lo, x_hi].
// Points with non-finite logs are skipped.
SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& pts, double x_lo,
                    double x_hi);

}  // namespace stableform
