#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stableform/potential.hpp"
#include "stableform/slope.hpp"
#include "stableform/testfunction.hpp"

namespace stableform {
namespace sharpness {

// Reference cutoff g_n: 0 on |x| <= n, 1 on |x| >= 2n, quintic-smoothstep
// transition in between, |g_n'| <= (15/8)/n <= 2/n.
TestFunction make_reference(double n);

// moments of g_n under mu, exploiting the three-piece structure
struct ReferenceMoments {
    double mu_g = 0.0;    // mu(g_n)
    double mu_g2 = 0.0;   // mu(g_n^2)
    double variance = 0.0;
};
ReferenceMoments reference_moments(const Measure& mu, double n);

// sup_x Gamma(g_n, g_n)(x) over a scan grid (the carre bound of the
// reference family; the kernel is measure-free)
double sup_carre(double alpha, double n, int scan_points = 48);

struct DisproofRow {
    double n;
    double energy;    // E(g_n, g_n)
    double variance;  // Var_mu(g_n)
    double ratio;
};

struct DisproofReport {
    std::vector<DisproofRow> rows;
    SlopeFit ratio_slope;  // log ratio vs log n
    double min_ratio = 0.0, max_ratio = 0.0;
};

// ratio_n = E(g_n,g_n) / Var(g_n); for PolyTail(eps < alpha) the ratio decays
// like n^{eps-alpha}, which disproves the Poincare inequality.
DisproofReport poincare_disproof(const Measure& mu, double alpha,
                                 std::span<const double> n_values);

struct SharpnessRow {
    double n;
    double r_n;
    double functional;
};

struct SharpnessReport {
    std::vector<SharpnessRow> rows;
    double c1_hat = 0.0, c_hat = 0.0;  // measured proof constants
    double running_liminf = 0.0;       // min of the functional over the tail
    bool flagged_too_small = false;    // the running liminf trends to zero
};

// Cor 1.3(2): r_n = (c1/2c) log^{-eps}(e+n), functional r_n^{1/eps} log beta(r_n).
// log_beta receives r and returns log beta(r).
SharpnessReport sp_sharpness_cor13(const Measure& mu, double alpha, double eps,
                                   const std::function<double(double)>& log_beta,
                                   std::span<const double> n_values);

enum class WpFunctional {
    Cor12_3,  // r_n^{(alpha-eps)/eps} * beta~(r_n)
    Cor13_4,  // beta~(r_n) * log^{eps}(1 + 1/r_n), eps < 0
    Cor14     // r_n^{1/(eps-1)} * log beta~(r_n)
};

// Weak-Poincare sharpness floors along r_n = Var(g_n)/2 derived from the
// reference functions. log_beta_tilde receives r, returns log beta~(r).
SharpnessReport wp_sharpness(const Measure& mu, double alpha, double eps,
                             const std::function<double(double)>& log_beta_tilde,
                             std::span<const double> n_values, WpFunctional which);

struct LsProbeRow {
    double n;
    double statistic;  // entropy / energy for the normalized 1 + t_n g_n
};

struct LsProbeReport {
    std::vector<LsProbeRow> rows;
    double max_statistic = 0.0;
    bool growing = false;  // statistic still rising at the end of the sweep
};

// Empirical lower bound on the log-Sobolev constant along normalized
// 1 + t_n g_n with t_n = mu(g_n^2)^{-1/2}.
LsProbeReport log_sobolev_probe(const Measure& mu, double alpha,
                                std::span<const double> n_values);

}  // namespace sharpness
}  // namespace stableform
