#include "stableform/slope.hpp"

#include <cmath>

#include "stableform/errors.hpp"

namespace stableform {

SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParam("fit_linear: need >= 2 points with matching sizes");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw InvalidParam("fit_linear: degenerate abscissas");
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.points = n;
    return fit;
}

SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& pts, double x_lo,
                    double x_hi) {
    std::vector<double> lx, ly;
    for (const auto& [x, y] : pts) {
        if (x < x_lo || x > x_hi) continue;
        const double a = std::log(x), b = std::log(y);
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        lx.push_back(a);
        ly.push_back(b);
    }
    return fit_linear(lx, ly);
}

}  // namespace stableform
