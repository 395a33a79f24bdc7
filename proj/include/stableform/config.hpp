#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stableform/criteria.hpp"
#include "stableform/potential.hpp"

namespace stableform {

struct PotentialConfig {
    std::string family = "poly_tail";
    double eps = 1.0;
    int dim = 1;
    double alpha = 1.0;  // PolyLogTail coefficient; defaults to the form's alpha
    std::string expr;    // custom family only
    bool radial_nondecreasing = true;
};

struct SpectralConfig {
    double R = 40.0;
    int n = 256;
    std::string mode = "censored";
    std::vector<double> times = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 100.0};
};

struct CurveConfig {
    std::string kind = "super_t11";  // super_t11|weak_t11|super_t51|weak_t52
    double r_lo = 1e-5;
    double r_hi = 1e-2;
    int points = 48;
};

struct ProbeConfig {
    std::vector<double> r_grid = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0};
    int family_size = 12;
};

struct SharpnessConfig {
    std::string corollary = "1.2";  // 1.2|1.3|1.4
    std::vector<double> n_values = {4.0, 8.0, 16.0, 32.0, 64.0};
};

struct LyapunovConfig {
    double x_min = 20.0;
    double x_max = 200.0;
    int points = 16;
    double threshold = 0.01;
};

struct RunConfig {
    PotentialConfig potential;
    double alpha = 1.0;
    std::string engine = "report";
    double c1 = 1.0, c2 = 1.0, c = 1.0;
    double delta = 0.5;
    std::optional<double> alpha0;  // default (min(1,alpha))/2
    SpectralConfig spectral;
    CurveConfig curve;
    ProbeConfig probe;
    SharpnessConfig sharpness;
    LyapunovConfig lyapunov;
    std::string out_dir = "out";
    unsigned long long seed = 0;

    Potential make_potential() const;
    Measure make_measure() const;
    double alpha0_or_default() const;
    nlohmann::json canonical_json() const;  // defaults filled in, keys sorted
};

// Parses + validates; unknown keys and out-of-range knobs are ConfigErrors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

}  // namespace stableform
