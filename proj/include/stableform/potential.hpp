#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stableform/expr.hpp"
#include "stableform/quadrature.hpp"

namespace stableform {

enum class Family { PolyTail, PolyLogTail, HeavyLogTail, StretchedLog, SubGaussian, Custom };

std::string family_name(Family f);

// The potential V. All representable potentials are radial in value (the
// built-in families by definition, custom ones because the expression grammar
// only sees |x|); `radial_nondecreasing` additionally asserts monotonicity
// in |x|, which the built-ins satisfy.
//
// Families:
//   PolyTail(eps):     V = ((d+eps)/2) log(1+|x|^2),                eps > 0
//   PolyLogTail(eps):  V = ((d+alpha)/2) log(1+|x|^2)
//                          + eps log log(e+|x|^2),                  eps real
//   HeavyLogTail(eps): V = (d/2) log(1+|x|^2) + eps log log(e+|x|^2)
//   StretchedLog(eps): V = log^{1+eps}(1+|x|^2),                    eps > 0
//   SubGaussian(eps):  V = (1+|x|^2)^eps,                           eps > 0
class Potential {
  public:
    static Potential poly_tail(double eps, int dim);
    static Potential poly_log_tail(double eps, int dim, double alpha);
    static Potential heavy_log_tail(double eps, int dim);
    static Potential stretched_log(double eps, int dim);
    static Potential sub_gaussian(double eps, int dim);
    static Potential custom(expr::Expression v_of_r, int dim, bool radial_nondecreasing,
                            std::function<double(double)> dv_dr = nullptr,
                            std::function<double(double)> radial_laplacian = nullptr);

    double operator()(std::span<const double> x) const;
    std::vector<double> grad(std::span<const double> x) const;
    double lapl(std::span<const double> x) const;

    double radial(double r) const;          // V at |x| = r
    double radial_logr(double lam) const;   // V at |x| = e^lam; stable for huge lam
    double radial_grad_sq(double r) const;  // |grad V|^2 at radius r
    double radial_lapl(double r) const;     // Laplacian of V at radius r

    // d*lam - V(e^lam), the log of the radial tail integrand r^{d-1} e^{-V} dr
    // in lam-space; computed without forming the cancelling difference of two
    // huge terms (the heavy families need lam up to ~1e15).
    double log_rd_weight(double lam) const;

    Family family() const;
    int dim() const;
    double eps() const;
    double alpha_coeff() const;  // PolyLogTail's leading coefficient alpha
    bool radial_nondecreasing() const;
    std::string describe() const;

  private:
    struct Impl;
    explicit Potential(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

// Radial quadrature controls for normalization and tail masses.
struct QuadSpec {
    double core_radius = 10.0;   // hand off to the tail substitution beyond this
    double rel_tol = 1e-11;      // relative tolerance of each radial integral
    double tail_exponent = 1.0;  // scale of the exponential tail substitution
};

// mu_V = e^{-V} dx / z with z = \int e^{-V} checked finite.
class Measure {
  public:
    // Throws NonIntegrable when the tail integral fails to converge
    // (e.g. HeavyLogTail with eps <= 1).
    static Measure normalize(const Potential& pot, const QuadSpec& spec = {});

    const Potential& potential() const { return pot_; }
    int dim() const;
    double z_const() const { return z_; }
    double log_z() const { return log_z_; }
    double z_est_error() const { return z_err_; }
    const QuadSpec& quad_spec() const { return spec_; }

    double tail_mass(double R) const;             // mu(|x| > R), exactly 1 at R = 0
    double tail_mass_logr(double lam_r) const;    // same with R = e^{lam_r}
    double ball_mass(double R) const { return 1.0 - tail_mass(R); }

    double density(std::span<const double> x) const;
    double log_density_radial(double r) const;  // log(e^{-V(r)} / z)

    // log of the radial integrand  r^{d-1} e^{-V(r)}  at r = e^lam
    // (surface factor not included).
    double log_radial_weight(double lam) const;

  private:
    Measure(Potential pot, QuadSpec spec, double z, double z_err, double core_int,
            double core_int_err);
    // \int_R^infty r^{d-1} e^{-V} dr without the sphere factor
    quad::QuadResult radial_tail(double lam_r) const;

    Potential pot_;
    QuadSpec spec_;
    double z_ = 0.0, log_z_ = 0.0, z_err_ = 0.0;
    double core_int_ = 0.0, core_int_err_ = 0.0;  // cached \int_0^{S0}
};

}  // namespace stableform
