#include "stableform/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "stableform/errors.hpp"

namespace stableform {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a table");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    reject_unknown(j, {"potential", "alpha", "engine", "c1", "c2", "c", "delta",
                       "alpha0", "spectral", "curve", "probe", "sharpness", "lyapunov",
                       "out_dir", "seed"},
                   "config");

    cfg.alpha = get_or(j, "alpha", 1.0);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
        throw ConfigError("alpha must lie in (0,2)");
    cfg.engine = get_or<std::string>(j, "engine", "report");
    static const std::set<std::string> engines = {"criteria", "beta",  "gap",
                                                  "decay",    "probe", "lyapunov",
                                                  "sharpness", "report", "compare",
                                                  "form"};
    if (!engines.count(cfg.engine))
        throw ConfigError("unknown engine \"" + cfg.engine + "\"");
    cfg.c1 = get_or(j, "c1", 1.0);
    cfg.c2 = get_or(j, "c2", 1.0);
    cfg.c = get_or(j, "c", 1.0);
    if (!(cfg.c1 > 0.0 && cfg.c2 > 0.0 && cfg.c > 0.0))
        throw ConfigError("constants c, c1, c2 must be positive");
    cfg.delta = get_or(j, "delta", 0.5);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (j.contains("alpha0")) {
        cfg.alpha0 = j.at("alpha0").get<double>();
        if (!(*cfg.alpha0 > 0.0 && *cfg.alpha0 < std::min(1.0, cfg.alpha)))
            throw ConfigError("alpha0 must lie in (0, min(1, alpha))");
    }
    cfg.out_dir = get_or<std::string>(j, "out_dir", "out");
    cfg.seed = get_or<unsigned long long>(j, "seed", 0ull);

    if (j.contains("potential")) {
        const json& p = j.at("potential");
        reject_unknown(p, {"family", "eps", "dim", "alpha", "expr",
                           "radial_nondecreasing"},
                       "potential");
        cfg.potential.family = get_or<std::string>(p, "family", "poly_tail");
        cfg.potential.eps = get_or(p, "eps", 1.0);
        cfg.potential.dim = get_or(p, "dim", 1);
        cfg.potential.alpha = get_or(p, "alpha", cfg.alpha);
        cfg.potential.expr = get_or<std::string>(p, "expr", "");
        cfg.potential.radial_nondecreasing = get_or(p, "radial_nondecreasing", true);
        static const std::set<std::string> families = {"poly_tail", "poly_log_tail",
                                                       "heavy_log_tail", "stretched_log",
                                                       "sub_gaussian", "custom"};
        if (!families.count(cfg.potential.family))
            throw ConfigError("unknown potential family \"" + cfg.potential.family + "\"");
        if (cfg.potential.family == "custom" && cfg.potential.expr.empty())
            throw ConfigError("custom potential needs an \"expr\"");
        if (cfg.potential.dim < 1) throw ConfigError("potential dim must be >= 1");
    } else {
        cfg.potential.alpha = cfg.alpha;
    }

    if (j.contains("spectral")) {
        const json& s = j.at("spectral");
        reject_unknown(s, {"R", "n", "mode", "times"}, "spectral");
        cfg.spectral.R = get_or(s, "R", 40.0);
        cfg.spectral.n = get_or(s, "n", 256);
        cfg.spectral.mode = get_or<std::string>(s, "mode", "censored");
        cfg.spectral.times = get_or(s, "times", cfg.spectral.times);
        if (!(cfg.spectral.R > 0.0)) throw ConfigError("spectral.R must be positive");
        if (cfg.spectral.n < 16 || cfg.spectral.n > 4096)
            throw ConfigError("spectral.n must lie in [16, 4096]");
        if (cfg.spectral.mode != "censored" && cfg.spectral.mode != "killed")
            throw ConfigError("spectral.mode must be censored or killed");
    }

    if (j.contains("curve")) {
        const json& s = j.at("curve");
        reject_unknown(s, {"kind", "r_lo", "r_hi", "points"}, "curve");
        cfg.curve.kind = get_or<std::string>(s, "kind", "super_t11");
        cfg.curve.r_lo = get_or(s, "r_lo", 1e-5);
        cfg.curve.r_hi = get_or(s, "r_hi", 1e-2);
        cfg.curve.points = get_or(s, "points", 48);
        static const std::set<std::string> kinds = {"super_t11", "weak_t11", "super_t51",
                                                    "weak_t52"};
        if (!kinds.count(cfg.curve.kind))
            throw ConfigError("unknown curve kind \"" + cfg.curve.kind + "\"");
        if (!(cfg.curve.r_lo > 0.0 && cfg.curve.r_hi > cfg.curve.r_lo))
            throw ConfigError("curve window must satisfy 0 < r_lo < r_hi");
        if (cfg.curve.points < 2 || cfg.curve.points > 4096)
            throw ConfigError("curve.points must lie in [2, 4096]");
    }

    if (j.contains("probe")) {
        const json& s = j.at("probe");
        reject_unknown(s, {"r_grid", "family_size"}, "probe");
        cfg.probe.r_grid = get_or(s, "r_grid", cfg.probe.r_grid);
        cfg.probe.family_size = get_or(s, "family_size", 12);
        if (cfg.probe.r_grid.empty()) throw ConfigError("probe.r_grid must be nonempty");
        for (double r : cfg.probe.r_grid)
            if (!(r > 0.0)) throw ConfigError("probe.r_grid entries must be positive");
        if (cfg.probe.family_size < 2 || cfg.probe.family_size > 12)
            throw ConfigError("probe.family_size must lie in [2, 12]");
    }

    if (j.contains("sharpness")) {
        const json& s = j.at("sharpness");
        reject_unknown(s, {"corollary", "n_values"}, "sharpness");
        cfg.sharpness.corollary = get_or<std::string>(s, "corollary", "1.2");
        cfg.sharpness.n_values = get_or(s, "n_values", cfg.sharpness.n_values);
        static const std::set<std::string> cors = {"1.2", "1.3", "1.4"};
        if (!cors.count(cfg.sharpness.corollary))
            throw ConfigError("sharpness.corollary must be 1.2, 1.3 or 1.4");
        for (double n : cfg.sharpness.n_values)
            if (!(n >= 1.0)) throw ConfigError("sharpness.n_values must be >= 1");
    }

    if (j.contains("lyapunov")) {
        const json& s = j.at("lyapunov");
        reject_unknown(s, {"x_min", "x_max", "points", "threshold"}, "lyapunov");
        cfg.lyapunov.x_min = get_or(s, "x_min", 20.0);
        cfg.lyapunov.x_max = get_or(s, "x_max", 200.0);
        cfg.lyapunov.points = get_or(s, "points", 16);
        cfg.lyapunov.threshold = get_or(s, "threshold", 0.01);
        if (!(cfg.lyapunov.x_min > 0.0 && cfg.lyapunov.x_max > cfg.lyapunov.x_min))
            throw ConfigError("lyapunov window must satisfy 0 < x_min < x_max");
        if (cfg.lyapunov.points < 2 || cfg.lyapunov.points > 1024)
            throw ConfigError("lyapunov.points must lie in [2, 1024]");
    }

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    return parse_config(j);
}

Potential RunConfig::make_potential() const {
    const auto& p = potential;
    if (p.family == "poly_tail") return Potential::poly_tail(p.eps, p.dim);
    if (p.family == "poly_log_tail")
        return Potential::poly_log_tail(p.eps, p.dim, p.alpha);
    if (p.family == "heavy_log_tail") return Potential::heavy_log_tail(p.eps, p.dim);
    if (p.family == "stretched_log") return Potential::stretched_log(p.eps, p.dim);
    if (p.family == "sub_gaussian") return Potential::sub_gaussian(p.eps, p.dim);
    return Potential::custom(expr::Expression::parse(p.expr), p.dim,
                             p.radial_nondecreasing);
}

Measure RunConfig::make_measure() const { return Measure::normalize(make_potential()); }

double RunConfig::alpha0_or_default() const {
    return alpha0 ? *alpha0 : 0.5 * std::min(1.0, alpha);
}

nlohmann::json RunConfig::canonical_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["engine"] = engine;
    j["c1"] = c1;
    j["c2"] = c2;
    j["c"] = c;
    j["delta"] = delta;
    j["alpha0"] = alpha0_or_default();
    j["seed"] = seed;
    // out_dir is where artifacts land, not part of what is computed, so it
    // stays outside the canonical form and the config hash
    j["potential"] = {{"family", potential.family},
                      {"eps", potential.eps},
                      {"dim", potential.dim},
                      {"alpha", potential.alpha},
                      {"expr", potential.expr},
                      {"radial_nondecreasing", potential.radial_nondecreasing}};
    j["spectral"] = {{"R", spectral.R},
                     {"n", spectral.n},
                     {"mode", spectral.mode},
                     {"times", spectral.times}};
    j["curve"] = {{"kind", curve.kind},
                  {"r_lo", curve.r_lo},
                  {"r_hi", curve.r_hi},
                  {"points", curve.points}};
    j["probe"] = {{"r_grid", probe.r_grid}, {"family_size", probe.family_size}};
    j["sharpness"] = {{"corollary", sharpness.corollary},
                      {"n_values", sharpness.n_values}};
    j["lyapunov"] = {{"x_min", lyapunov.x_min},
                     {"x_max", lyapunov.x_max},
                     {"points", lyapunov.points},
                     {"threshold", lyapunov.threshold}};
    return j;
}

}  // namespace stableform
