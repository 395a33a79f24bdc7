#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stableform/potential.hpp"
#include "stableform/testfunction.hpp"

namespace stableform {
namespace spectral {

enum class BoundaryMode { Censored, Killed };

// Discretized jump form on [-R, R]: cell centers/widths, cell masses mu_i,
// symmetric pair weights kappa_ij ~ \iint_{cell_i x cell_j} |x-y|^{-1-alpha},
// with near-diagonal pairs integrated in closed form against a gradient
// reconstruction (the raw kernel pair integral diverges for alpha >= 1).
//
// Q(f) = sum_{i<j} (rho_i + rho_j) kappa_ij (f_i - f_j)^2   (rho_i = mu_i/w_i)
//      [+ sum_i mu_i kill_i f_i^2 in Killed mode]
class FormMatrix {
  public:
    std::vector<double> nodes, widths, mu;
    std::vector<double> kernel;  // kappa, dense n*n row-major, symmetric
    std::vector<double> kill;    // Killed mode rates, else empty
    BoundaryMode mode = BoundaryMode::Censored;
    double alpha = 1.0;
    double window_R = 0.0;

    int n() const { return static_cast<int>(nodes.size()); }
    double kappa(int i, int j) const { return kernel[static_cast<std::size_t>(i) * nodes.size() + j]; }

    double quad_form(std::span<const double> f) const;            // Q(f)
    double mu_dot(std::span<const double> f, std::span<const double> g) const;
    double mu_mass() const;                                       // sum mu_i
    std::vector<double> sample(const TestFunction& fn) const;     // fn at nodes
    std::vector<double> generator_row_sums() const;               // diagnostics
};

struct AssembleOptions {
    double core_fraction = 0.5;  // fraction of [-R,R] covered uniformly
    double core_cells = 0.85;    // fraction of cells spent on the core
    int near_band = 1;           // gradient-reconstructed touching pairs
};

FormMatrix assemble(const Measure& mu, double alpha, double R, int n, BoundaryMode mode,
                    const AssembleOptions& = {});

struct GapResult {
    double lambda1 = 0.0;
    std::vector<double> eigvec;    // mu-orthogonal to constants (Censored)
    double rayleigh = 0.0;         // Rayleigh quotient of eigvec
    double lambda0 = 0.0;          // bottom eigenvalue (0 in Censored mode)
};

// Censored mode: smallest nonzero eigenvalue of the mu-weighted generator.
// Killed mode: bottom eigenvalue.
GapResult spectral_gap(const FormMatrix& form);

// full spectrum of the mu-weighted generator, ascending
std::vector<double> spectrum(const FormMatrix& form);

// Best constant of the local Poincare inequality on B(0, r): inverse gap of
// the censored form assembled on [-r, r].
double local_poincare_constant(const Measure& mu, double alpha, double r, int n);

struct DecayCurve {
    std::vector<double> t;
    std::vector<double> variance;     // squared mu-norm of e^{-tA} f0
    double fitted_rate = 0.0;         // variance ~ e^{-2 * rate * t}
};

DecayCurve semigroup_decay(const FormMatrix& form, std::span<const double> f0,
                           std::span<const double> times);

struct ProbeViolation {
    double r;
    std::string fn;
    double lhs, rhs;
};

struct ProbeReport {
    std::vector<ProbeViolation> violations;
    int checks = 0;
    double fitted_c1 = 1.0;
};

// Checks mu(f^2) <= r Q(f) + beta(r) mu(|f|)^2 over the family and r-grid;
// a finite family makes this a necessary-condition probe only.
ProbeReport super_poincare_probe(const FormMatrix& form,
                                 const std::function<double(double)>& beta_of_r,
                                 std::span<const TestFunction> family,
                                 std::span<const double> r_grid);

// Fits the smallest multiplier c1 on beta that removes all violations over
// the training half of the family, then reports on the held-out half.
ProbeReport super_poincare_probe_fitted(const FormMatrix& form,
                                        const std::function<double(double)>& beta_of_r,
                                        std::span<const TestFunction> family,
                                        std::span<const double> r_grid);

}  // namespace spectral
}  // namespace stableform
