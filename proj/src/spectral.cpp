#include "stableform/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/quadrature.hpp"
#include "stableform/slope.hpp"

namespace stableform {
namespace spectral {

namespace {

// twice-integrated kernel antiderivatives:
//   A2''(t) = |t|^{1-alpha}   (gradient-reconstructed near field)
//   A0''(t) = |t|^{-1-alpha}  (exact far field; cells must not touch)
double a2(double t, double alpha) {
    return std::pow(std::abs(t), 3.0 - alpha) / ((2.0 - alpha) * (3.0 - alpha));
}

double a0(double t, double alpha) {
    if (alpha == 1.0) return -std::log(std::abs(t));
    return std::pow(std::abs(t), 1.0 - alpha) / (alpha * (alpha - 1.0));
}

double pair_integral_grad(double a, double b, double c, double d, double alpha) {
    return a2(b - c, alpha) - a2(a - c, alpha) - a2(b - d, alpha) + a2(a - d, alpha);
}

double pair_integral_exact(double a, double b, double c, double d, double alpha) {
    return a0(b - c, alpha) - a0(a - c, alpha) - a0(b - d, alpha) + a0(a - d, alpha);
}

std::vector<double> build_cells(double R, int n, double core_fraction,
                                double core_cells, std::vector<double>& widths) {
    // uniform core on [-cR, cR], geometrically stretched cells outside; the
    // core gets more than its length share of cells, so the flanks stretch
    const int n_side = std::max(0, static_cast<int>(std::round(0.5 * n * (1.0 - core_cells))));
    const int n_core = n - 2 * n_side;
    const double cr = n_side == 0 ? R : core_fraction * R;
    const double h = 2.0 * cr / n_core;
    const double span = R - cr;

    std::vector<double> side;  // widths from the core outward
    if (n_side > 0) {
        // grow geometrically away from the core, then shrink back toward the
        // window edge: the censored eigenfunctions carry a dist^{alpha/2}
        // boundary cusp that coarse edge cells would dominate the error with
        const int n_up = (n_side + 1) / 2, n_dn = n_side - n_up;
        auto total = [&](double q) {
            double s = 0.0, w = h;
            for (int i = 0; i < n_up; ++i) {
                w *= q;
                s += w;
            }
            for (int i = 0; i < n_dn; ++i) {
                w /= q;
                s += w;
            }
            return s;
        };
        auto fill = [&](double q) {
            side.clear();
            double w = h;
            for (int i = 0; i < n_up; ++i) {
                w *= q;
                side.push_back(w);
            }
            for (int i = 0; i < n_dn; ++i) {
                w /= q;
                side.push_back(w);
            }
        };
        if (total(1.0) >= span) {
            side.assign(n_side, span / n_side);
        } else {
            double qlo = 1.0, qhi = 2.0;
            while (total(qhi) < span) qhi *= 1.5;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (qlo + qhi);
                (total(mid) < span ? qlo : qhi) = mid;
            }
            fill(0.5 * (qlo + qhi));
        }
    }

    std::vector<double> edges;
    edges.reserve(n + 1);
    edges.push_back(-R);
    double pos = -R;
    for (int i = n_side - 1; i >= 0; --i) {  // left flank, shrinking inward
        pos += side[i];
        edges.push_back(pos);
    }
    if (n_side > 0) edges.back() = -cr;
    for (int i = 1; i < n_core; ++i) edges.push_back(-cr + i * h);
    edges.push_back(cr);
    pos = cr;
    for (int i = 0; i < n_side; ++i) {  // right flank, growing outward
        pos += side[i];
        edges.push_back(pos);
    }
    edges.back() = R;
    if (static_cast<int>(edges.size()) != n + 1)
        throw GridTooCoarse("cell construction mismatch");

    std::vector<double> centers(n);
    widths.resize(n);
    for (int i = 0; i < n; ++i) {
        centers[i] = 0.5 * (edges[i] + edges[i + 1]);
        widths[i] = edges[i + 1] - edges[i];
        if (!(widths[i] > 0.0)) throw GridTooCoarse("non-positive cell width");
    }
    return centers;
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct EigBasis {
    Vector values;
    Matrix vectors;        // columns orthonormal in l2
    Vector sqrt_mu;
};

EigBasis eig_decompose(const FormMatrix& form) {
    const int n = form.n();
    Vector sqrt_mu(n);
    for (int i = 0; i < n; ++i) sqrt_mu[i] = std::sqrt(form.mu[i]);

    // L from the symmetric conductances; B = M^{-1/2} L M^{-1/2}
    Matrix B = Matrix::Zero(n, n);
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = form.mu[i] / form.widths[i];
    std::vector<double> diag(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double s = (rho[i] + rho[j]) * form.kappa(i, j);
            diag[i] += s;
            diag[j] += s;
            B(i, j) = -s / (sqrt_mu[i] * sqrt_mu[j]);
            B(j, i) = B(i, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        double d = diag[i];
        if (form.mode == BoundaryMode::Killed) d += form.mu[i] * form.kill[i];
        B(i, i) = d / form.mu[i];
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(B);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("dense symmetric eigensolve did not converge");
    return {solver.eigenvalues(), solver.eigenvectors(), sqrt_mu};
}

}  // namespace

double FormMatrix::quad_form(std::span<const double> f) const {
    const int N = n();
    double q = 0.0;
    for (int i = 0; i < N; ++i) {
        const double ri = mu[i] / widths[i];
        for (int j = i + 1; j < N; ++j) {
            const double d = f[i] - f[j];
            q += (ri + mu[j] / widths[j]) * kappa(i, j) * d * d;
        }
    }
    if (mode == BoundaryMode::Killed)
        for (int i = 0; i < N; ++i) q += mu[i] * kill[i] * f[i] * f[i];
    return q;
}

double FormMatrix::mu_dot(std::span<const double> f, std::span<const double> g) const {
    double s = 0.0;
    for (int i = 0; i < n(); ++i) s += mu[i] * f[i] * g[i];
    return s;
}

double FormMatrix::mu_mass() const {
    double s = 0.0;
    for (double m : mu) s += m;
    return s;
}

std::vector<double> FormMatrix::sample(const TestFunction& fn) const {
    std::vector<double> f(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = fn(nodes[i]);
    return f;
}

std::vector<double> FormMatrix::generator_row_sums() const {
    std::vector<double> out(n(), 0.0);
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (i != j) out[i] += kappa(i, j);
    return out;
}

FormMatrix assemble(const Measure& measure, double alpha, double R, int n,
                    BoundaryMode mode, const AssembleOptions& opts) {
    if (measure.dim() != 1) throw InvalidParam("assemble: spectral numerics are 1-D");
    if (n < 16) throw InvalidParam("assemble: n >= 16 required");
    if (!(R > 0.0)) throw InvalidParam("assemble: R > 0 required");
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("assemble: alpha in (0,2)");

    FormMatrix form;
    form.mode = mode;
    form.alpha = alpha;
    form.window_R = R;
    form.nodes = build_cells(R, n, opts.core_fraction, opts.core_cells, form.widths);

    form.mu.resize(n);
    quad::QuadOptions qo;
    qo.rel_tol = 1e-10;
    for (int i = 0; i < n; ++i) {
        const double a = form.nodes[i] - 0.5 * form.widths[i];
        const double b = form.nodes[i] + 0.5 * form.widths[i];
        auto rho = [&](double x) {
            std::vector<double> p{x};
            return measure.density(p);
        };
        form.mu[i] = quad::adaptive(rho, a, b, qo).value;
        if (!(form.mu[i] > 0.0)) throw GridTooCoarse("vanishing cell mass");
    }

    form.kernel.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double ai = form.nodes[i] - 0.5 * form.widths[i];
        const double bi = form.nodes[i] + 0.5 * form.widths[i];
        for (int j = i + 1; j < n; ++j) {
            const double aj = form.nodes[j] - 0.5 * form.widths[j];
            const double bj = form.nodes[j] + 0.5 * form.widths[j];
            double k;
            if (j - i <= opts.near_band) {
                const double dx = form.nodes[i] - form.nodes[j];
                k = pair_integral_grad(ai, bi, aj, bj, alpha) / (dx * dx);
            } else {
                k = pair_integral_exact(ai, bi, aj, bj, alpha);
            }
            if (!std::isfinite(k) || k < 0.0)
                throw GridTooCoarse("cell-pair kernel integration failed");
            form.kernel[static_cast<std::size_t>(i) * n + j] = k;
            form.kernel[static_cast<std::size_t>(j) * n + i] = k;
        }
    }

    if (mode == BoundaryMode::Killed) {
        form.kill.resize(n);
        for (int i = 0; i < n; ++i) {
            const double xi = form.nodes[i];
            form.kill[i] =
                (std::pow(R - xi, -alpha) + std::pow(R + xi, -alpha)) / alpha;
        }
    }
    return form;
}

GapResult spectral_gap(const FormMatrix& form) {
    EigBasis basis = eig_decompose(form);
    const int n = form.n();
    GapResult res;
    res.lambda0 = basis.values[0];

    int idx;
    if (form.mode == BoundaryMode::Censored) {
        // bottom eigenvalue is the constant mode (0 up to roundoff)
        idx = 1;
        const double scale = std::abs(basis.values[n - 1]) + 1e-300;
        if (std::abs(basis.values[0]) > 1e-8 * scale)
            throw SolverFailure("censored form: constant mode not found near zero");
    } else {
        idx = 0;
    }
    res.lambda1 = basis.values[idx];

    res.eigvec.resize(n);
    for (int i = 0; i < n; ++i) res.eigvec[i] = basis.vectors(i, idx) / basis.sqrt_mu[i];
    // deterministic sign
    for (int i = 0; i < n; ++i) {
        if (std::abs(res.eigvec[i]) > 1e-12) {
            if (res.eigvec[i] < 0.0)
                for (auto& v : res.eigvec) v = -v;
            break;
        }
    }
    const double q = form.quad_form(res.eigvec);
    const double m = form.mu_dot(res.eigvec, res.eigvec);
    res.rayleigh = q / m;
    return res;
}

std::vector<double> spectrum(const FormMatrix& form) {
    EigBasis basis = eig_decompose(form);
    return std::vector<double>(basis.values.data(), basis.values.data() + form.n());
}

double local_poincare_constant(const Measure& mu, double alpha, double r, int n) {
    if (!(r > 0.0)) throw InvalidParam("local_poincare_constant: r > 0");
    FormMatrix form = assemble(mu, alpha, r, n, BoundaryMode::Censored);
    GapResult gap = spectral_gap(form);
    if (!(gap.lambda1 > 0.0)) throw SolverFailure("vanishing local gap");
    return 1.0 / gap.lambda1;
}

DecayCurve semigroup_decay(const FormMatrix& form, std::span<const double> f0,
                           std::span<const double> times) {
    if (form.mode != BoundaryMode::Censored)
        throw InvalidParam("semigroup_decay expects the censored form");
    const int n = form.n();
    if (static_cast<int>(f0.size()) != n) throw InvalidParam("f0 size mismatch");
    const double mean = form.mu_dot(f0, std::vector<double>(n, 1.0)) / form.mu_mass();
    if (std::abs(mean) > 1e-8 * std::sqrt(form.mu_dot(f0, f0) + 1e-300))
        throw InvalidParam("semigroup_decay: f0 must be mean-zero under mu");

    EigBasis basis = eig_decompose(form);
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = basis.sqrt_mu[i] * f0[i];
    Vector coef = basis.vectors.transpose() * w;

    DecayCurve curve;
    for (double t : times) {
        double v = 0.0;
        for (int k = 1; k < n; ++k)
            v += coef[k] * coef[k] * std::exp(-2.0 * basis.values[k] * t);
        curve.t.push_back(t);
        curve.variance.push_back(v);
    }

    // fit the exponential rate on the late-time stretch that is still resolved
    std::vector<double> xs, ys;
    const double v0 = curve.variance.front();
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (curve.t[i] <= 0.0) continue;
        if (curve.variance[i] < 1e-13 * v0 || curve.variance[i] <= 0.0) continue;
        if (curve.variance[i] > 0.2 * v0) continue;
        xs.push_back(curve.t[i]);
        ys.push_back(std::log(curve.variance[i]));
    }
    if (xs.size() >= 2) curve.fitted_rate = -0.5 * fit_linear(xs, ys).slope;
    return curve;
}

namespace {

ProbeReport run_probe(const FormMatrix& form,
                      const std::function<double(double)>& beta_of_r,
                      std::span<const TestFunction> family,
                      std::span<const double> r_grid, double c1) {
    ProbeReport rep;
    rep.fitted_c1 = c1;
    for (const auto& fn : family) {
        std::vector<double> f = form.sample(fn);
        const double q = form.quad_form(f);
        const double m2 = form.mu_dot(f, f);
        double m1 = 0.0;
        for (int i = 0; i < form.n(); ++i) m1 += form.mu[i] * std::abs(f[i]);
        for (double r : r_grid) {
            ++rep.checks;
            const double rhs = r * q + c1 * beta_of_r(r) * m1 * m1;
            if (m2 > rhs * (1.0 + 1e-12) + 1e-300)
                rep.violations.push_back({r, fn.name, m2, rhs});
        }
    }
    return rep;
}

}  // namespace

ProbeReport super_poincare_probe(const FormMatrix& form,
                                 const std::function<double(double)>& beta_of_r,
                                 std::span<const TestFunction> family,
                                 std::span<const double> r_grid) {
    if (family.empty()) throw InvalidParam("probe needs a nonempty family");
    return run_probe(form, beta_of_r, family, r_grid, 1.0);
}

ProbeReport super_poincare_probe_fitted(const FormMatrix& form,
                                        const std::function<double(double)>& beta_of_r,
                                        std::span<const TestFunction> family,
                                        std::span<const double> r_grid) {
    if (family.size() < 2) throw InvalidParam("fitted probe needs >= 2 functions");
    const std::size_t half = family.size() / 2;
    double c1 = 0.0;
    for (std::size_t k = 0; k < half; ++k) {
        std::vector<double> f = form.sample(family[k]);
        const double q = form.quad_form(f);
        const double m2 = form.mu_dot(f, f);
        double m1 = 0.0;
        for (int i = 0; i < form.n(); ++i) m1 += form.mu[i] * std::abs(f[i]);
        if (m1 <= 0.0) continue;
        for (double r : r_grid) {
            const double need = (m2 - r * q) / (beta_of_r(r) * m1 * m1);
            c1 = std::max(c1, need);
        }
    }
    c1 = std::max(c1, 1e-12) * (1.0 + 1e-9);
    ProbeReport rep = run_probe(form, beta_of_r, family.subspan(half), r_grid, c1);
    rep.fitted_c1 = c1;
    return rep;
}

}  // namespace spectral
}  // namespace stableform
