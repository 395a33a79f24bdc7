#include "stableform/potential.hpp"

#include <cmath>
#include <sstream>

#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"

namespace stableform {

std::string family_name(Family f) {
    switch (f) {
        case Family::PolyTail: return "poly_tail";
        case Family::PolyLogTail: return "poly_log_tail";
        case Family::HeavyLogTail: return "heavy_log_tail";
        case Family::StretchedLog: return "stretched_log";
        case Family::SubGaussian: return "sub_gaussian";
        case Family::Custom: return "custom";
    }
    return "?";
}

struct Potential::Impl {
    Family family = Family::Custom;
    int dim = 1;
    double eps = 0.0;
    double alpha = 0.0;  // PolyLogTail only
    bool monotone = true;
    std::optional<expr::Expression> custom;
    std::function<double(double)> custom_dv;
    std::function<double(double)> custom_lap;

    // t = r^2 parameterization for the built-in families:
    // V = w(t),  grad V = 2 w'(t) x,  Delta V = 2 d w'(t) + 4 t w''(t).
    double w(double t) const {
        const double L2 = std::log1p(t);
        switch (family) {
            case Family::PolyTail: return 0.5 * (dim + eps) * L2;
            case Family::PolyLogTail:
                return 0.5 * (dim + alpha) * L2 + eps * std::log(std::log(M_E + t));
            case Family::HeavyLogTail:
                return 0.5 * dim * L2 + eps * std::log(std::log(M_E + t));
            case Family::StretchedLog: return std::pow(L2, 1.0 + eps);
            case Family::SubGaussian: return std::pow(1.0 + t, eps);
            case Family::Custom: break;
        }
        return 0.0;
    }

    double w1(double t) const {  // dw/dt
        switch (family) {
            case Family::PolyTail: return 0.5 * (dim + eps) / (1.0 + t);
            case Family::PolyLogTail: {
                const double le = std::log(M_E + t);
                return 0.5 * (dim + alpha) / (1.0 + t) + eps / ((M_E + t) * le);
            }
            case Family::HeavyLogTail: {
                const double le = std::log(M_E + t);
                return 0.5 * dim / (1.0 + t) + eps / ((M_E + t) * le);
            }
            case Family::StretchedLog:
                return (1.0 + eps) * std::pow(std::log1p(t), eps) / (1.0 + t);
            case Family::SubGaussian: return eps * std::pow(1.0 + t, eps - 1.0);
            case Family::Custom: break;
        }
        return 0.0;
    }

    double w2(double t) const {  // d^2 w / dt^2
        switch (family) {
            case Family::PolyTail: {
                const double u = 1.0 + t;
                return -0.5 * (dim + eps) / (u * u);
            }
            case Family::PolyLogTail: {
                const double u = 1.0 + t, v = M_E + t, le = std::log(v);
                return -0.5 * (dim + alpha) / (u * u) - eps * (le + 1.0) / (v * v * le * le);
            }
            case Family::HeavyLogTail: {
                const double u = 1.0 + t, v = M_E + t, le = std::log(v);
                return -0.5 * dim / (u * u) - eps * (le + 1.0) / (v * v * le * le);
            }
            case Family::StretchedLog: {
                const double L2 = std::log1p(t), u = 1.0 + t;
                if (L2 == 0.0) return eps > 1.0 ? 0.0 : (eps == 1.0 ? 2.0 / (u * u) : kInf);
                return (1.0 + eps) * std::pow(L2, eps - 1.0) * (eps - L2) / (u * u);
            }
            case Family::SubGaussian:
                return eps * (eps - 1.0) * std::pow(1.0 + t, eps - 2.0);
            case Family::Custom: break;
        }
        return 0.0;
    }

    // V at r = e^lam, written through softplus so huge radii stay finite.
    double value_logr(double lam) const {
        switch (family) {
            case Family::PolyTail: return 0.5 * (dim + eps) * log1p_r2(lam);
            case Family::PolyLogTail:
                return 0.5 * (dim + alpha) * log1p_r2(lam) +
                       eps * std::log(log_e_plus_r2(lam));
            case Family::HeavyLogTail:
                return 0.5 * dim * log1p_r2(lam) + eps * std::log(log_e_plus_r2(lam));
            case Family::StretchedLog: return std::pow(log1p_r2(lam), 1.0 + eps);
            case Family::SubGaussian: {
                const double le = eps * log1p_r2(lam);
                return le > 709.0 ? kInf : std::exp(le);
            }
            case Family::Custom: return custom->eval(std::exp(lam));
        }
        return 0.0;
    }
};

Potential::Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Potential Potential::poly_tail(double eps, int dim) {
    if (eps <= 0.0) throw InvalidParam("poly_tail requires eps > 0");
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::PolyTail;
    impl->eps = eps;
    impl->dim = dim;
    return Potential(impl);
}

Potential Potential::poly_log_tail(double eps, int dim, double alpha) {
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidParam("poly_log_tail needs alpha in (0,2)");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::PolyLogTail;
    impl->eps = eps;
    impl->dim = dim;
    impl->alpha = alpha;
    // eps < 0 makes V dip below its value at 0 only logarithmically; still
    // nondecreasing fails near the origin for very negative eps, but the
    // combined V stays nondecreasing for eps >= -e(d+alpha)/2.
    impl->monotone = eps >= -0.5 * M_E * (dim + alpha);
    return Potential(impl);
}

Potential Potential::heavy_log_tail(double eps, int dim) {
    if (eps <= 0.0) throw InvalidParam("heavy_log_tail requires eps > 0");
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::HeavyLogTail;
    impl->eps = eps;
    impl->dim = dim;
    return Potential(impl);
}

Potential Potential::stretched_log(double eps, int dim) {
    if (eps <= 0.0) throw InvalidParam("stretched_log requires eps > 0");
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::StretchedLog;
    impl->eps = eps;
    impl->dim = dim;
    return Potential(impl);
}

Potential Potential::sub_gaussian(double eps, int dim) {
    if (eps <= 0.0) throw InvalidParam("sub_gaussian requires eps > 0");
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::SubGaussian;
    impl->eps = eps;
    impl->dim = dim;
    return Potential(impl);
}

Potential Potential::custom(expr::Expression v_of_r, int dim, bool radial_nondecreasing,
                            std::function<double(double)> dv_dr,
                            std::function<double(double)> radial_laplacian) {
    if (dim < 1) throw InvalidParam("dim must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->family = Family::Custom;
    impl->dim = dim;
    impl->monotone = radial_nondecreasing;
    impl->custom = std::move(v_of_r);
    impl->custom_dv = std::move(dv_dr);
    impl->custom_lap = std::move(radial_laplacian);
    return Potential(impl);
}

double Potential::radial(double r) const {
    r = std::abs(r);
    if (impl_->family == Family::Custom) return impl_->custom->eval(r);
    if (r > 1e130) return radial_logr(std::log(r));
    return impl_->w(r * r);
}

double Potential::radial_logr(double lam) const { return impl_->value_logr(lam); }

double Potential::log_rd_weight(double lam) const {
    const double d = impl_->dim;
    // d*lam - V: the heavy families have V = a*lam + slowly-varying, so the
    // linear parts are cancelled analytically
    switch (impl_->family) {
        case Family::PolyTail:
            // softplus(2l) = 2l + softplus(-2l) identically, so
            // d*lam - (d+eps)/2 softplus(2 lam) = -eps lam - (d+eps)/2 softplus(-2 lam)
            return -impl_->eps * lam - 0.5 * (d + impl_->eps) * softplus(-2.0 * lam);
        case Family::PolyLogTail:
            return -impl_->alpha * lam -
                   0.5 * (d + impl_->alpha) * softplus(-2.0 * lam) -
                   impl_->eps * std::log(log_e_plus_r2(lam));
        case Family::HeavyLogTail:
            return -0.5 * d * softplus(-2.0 * lam) -
                   impl_->eps * std::log(log_e_plus_r2(lam));
        default:
            // light tails: V outgrows d*lam long before precision is an issue
            return d * lam - impl_->value_logr(lam);
    }
}

double Potential::operator()(std::span<const double> x) const {
    double t = 0.0;
    for (double xi : x) t += xi * xi;
    return radial(std::sqrt(t));
}

namespace {
// finite-difference step per the custom-potential fallback convention
inline double fd_step(double r) { return 1e-5 * (1.0 + std::abs(r)); }
}  // namespace

double Potential::radial_grad_sq(double r) const {
    r = std::abs(r);
    if (impl_->family == Family::Custom) {
        double dv;
        if (impl_->custom_dv) {
            dv = impl_->custom_dv(r);
        } else {
            const double h = fd_step(r);
            // V extends evenly through 0
            dv = (radial(r + h) - radial(std::abs(r - h))) / (2.0 * h);
            if (r < h) dv = (radial(r + h) - radial(std::abs(r - h))) / (2.0 * h);
        }
        return dv * dv;
    }
    const double t = r * r;
    const double w1 = impl_->w1(t);
    return 4.0 * t * w1 * w1;
}

double Potential::radial_lapl(double r) const {
    r = std::abs(r);
    if (impl_->family == Family::Custom) {
        if (impl_->custom_lap) return impl_->custom_lap(r);
        const double h = fd_step(r);
        const double d = impl_->dim;
        if (r < h) {  // even extension: V'(0) = 0, Delta V = d V''(0)
            return d * 2.0 * (radial(h) - radial(0.0)) / (h * h);
        }
        const double vp = (radial(r + h) - radial(r - h)) / (2.0 * h);
        const double vpp = (radial(r + h) - 2.0 * radial(r) + radial(r - h)) / (h * h);
        return vpp + (d - 1.0) * vp / r;
    }
    const double t = r * r;
    return 2.0 * impl_->dim * impl_->w1(t) + 4.0 * t * impl_->w2(t);
}

std::vector<double> Potential::grad(std::span<const double> x) const {
    const int d = impl_->dim;
    std::vector<double> g(x.begin(), x.end());
    double t = 0.0;
    for (double xi : x) t += xi * xi;
    if (impl_->family == Family::Custom) {
        const double r = std::sqrt(t);
        if (r == 0.0) return std::vector<double>(d, 0.0);
        const double dv = std::sqrt(radial_grad_sq(r));
        // sign of V' from a coarse difference
        const double h = fd_step(r);
        const double sgn = radial(r + h) >= radial(std::abs(r - h)) ? 1.0 : -1.0;
        for (auto& gi : g) gi *= sgn * dv / r;
        return g;
    }
    const double c = 2.0 * impl_->w1(t);
    for (auto& gi : g) gi *= c;
    return g;
}

double Potential::lapl(std::span<const double> x) const {
    double t = 0.0;
    for (double xi : x) t += xi * xi;
    return radial_lapl(std::sqrt(t));
}

Family Potential::family() const { return impl_->family; }
int Potential::dim() const { return impl_->dim; }
double Potential::eps() const { return impl_->eps; }
double Potential::alpha_coeff() const { return impl_->alpha; }
bool Potential::radial_nondecreasing() const { return impl_->monotone; }

std::string Potential::describe() const {
    std::ostringstream os;
    os << family_name(impl_->family) << "(d=" << impl_->dim;
    if (impl_->family == Family::Custom)
        os << ", V=" << impl_->custom->text();
    else
        os << ", eps=" << impl_->eps;
    if (impl_->family == Family::PolyLogTail) os << ", alpha=" << impl_->alpha;
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Measure

Measure::Measure(Potential pot, QuadSpec spec, double z, double z_err, double core_int,
                 double core_int_err)
    : pot_(std::move(pot)),
      spec_(spec),
      z_(z),
      log_z_(std::log(z)),
      z_err_(z_err),
      core_int_(core_int),
      core_int_err_(core_int_err) {}

int Measure::dim() const { return pot_.dim(); }

double Measure::log_radial_weight(double lam) const {
    return pot_.log_rd_weight(lam) - lam;
}

quad::QuadResult Measure::radial_tail(double lam_r) const {
    quad::QuadOptions o;
    o.rel_tol = spec_.rel_tol;
    o.min_segments = 16;
    const double c = spec_.tail_exponent;
    // \int r^{d-1} e^{-V} dr = \int exp(d*lam - V(e^lam)) dlam
    auto f = [this](double lam) {
        const double lg = pot_.log_rd_weight(lam);
        return lg > -700.0 ? std::exp(lg) : 0.0;
    };
    if (c == 1.0) return quad::integrate_exp_tail(f, lam_r, o);
    // scaled substitution lam = lam0 + c*expm1(v)
    auto g = [&](double u) {
        const double om = 1.0 - u;
        if (om <= 0.0) return 0.0;
        const double v = u / om;
        if (v > 690.0) return 0.0;
        const double lam = lam_r + c * std::expm1(v);
        const double fl = f(lam);
        return fl == 0.0 ? 0.0 : fl * c * std::exp(v) / (om * om);
    };
    return quad::adaptive(g, 0.0, 1.0, o);
}

Measure Measure::normalize(const Potential& pot, const QuadSpec& spec) {
    quad::QuadOptions o;
    o.rel_tol = spec.rel_tol;
    const double s0 = spec.core_radius;
    const int d = pot.dim();

    auto radial_integrand = [&](double r) {
        const double lg = (d - 1.0) * std::log(std::max(r, 1e-300)) - pot.radial(r);
        return lg > -700.0 ? std::exp(lg) : 0.0;
    };
    quad::QuadResult core = quad::adaptive(radial_integrand, 0.0, s0, o);

    // tail decay screen: unit-lambda windows past the core must trend down
    Measure tmp(pot, spec, 1.0, 0.0, 0.0, 0.0);
    const double lam0 = std::log(s0);
    double prev_window = kInf;
    int rises = 0;
    for (int j = 0; j < 8; ++j) {
        auto f = [&](double lam) {
            const double lg = pot.log_rd_weight(lam);
            return lg > -700.0 ? std::exp(lg) : 0.0;
        };
        const double w = quad::adaptive(f, lam0 + 2.0 * j, lam0 + 2.0 * (j + 1), o).value;
        if (j >= 2 && w > prev_window * 1.0001) ++rises;
        prev_window = w;
    }
    quad::QuadResult tail = tmp.radial_tail(lam0);
    if (!tail.converged || rises > 2 || !std::isfinite(tail.value))
        throw NonIntegrable("tail integral of exp(-V) fails to decay for " +
                            pot.describe());

    const double z = sphere_area(d) * (core.value + tail.value);
    if (!(z > 0.0) || !std::isfinite(z))
        throw NonIntegrable("normalization integral not positive/finite for " +
                            pot.describe());
    const double z_err = sphere_area(d) * (core.est_error + tail.est_error);
    return Measure(pot, spec, z, z_err, core.value, core.est_error);
}

double Measure::tail_mass(double R) const {
    if (R <= 0.0) return 1.0;
    return tail_mass_logr(std::log(R));
}

double Measure::tail_mass_logr(double lam_r) const {
    const double s0 = spec_.core_radius;
    const double lam0 = std::log(s0);
    double integral;
    if (lam_r >= lam0) {
        integral = radial_tail(lam_r).value;
    } else {
        quad::QuadOptions o;
        o.rel_tol = spec_.rel_tol;
        const int d = pot_.dim();
        auto radial_integrand = [&](double r) {
            const double lg = (d - 1.0) * std::log(std::max(r, 1e-300)) - pot_.radial(r);
            return lg > -700.0 ? std::exp(lg) : 0.0;
        };
        const double R = std::exp(lam_r);
        integral = quad::adaptive(radial_integrand, R, s0, o).value + radial_tail(lam0).value;
    }
    const double m = sphere_area(pot_.dim()) * integral / z_;
    return std::min(1.0, std::max(0.0, m));
}

double Measure::density(std::span<const double> x) const {
    return std::exp(-pot_(x) - log_z_);
}

double Measure::log_density_radial(double r) const { return -pot_.radial(r) - log_z_; }

}  // namespace stableform
