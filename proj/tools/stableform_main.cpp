#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "stableform/config.hpp"
#include "stableform/criteria.hpp"
#include "stableform/errors.hpp"
#include "stableform/mathutil.hpp"
#include "stableform/nonlocal.hpp"
#include "stableform/report.hpp"
#include "stableform/sharpness.hpp"
#include "stableform/spectral.hpp"
#include "stableform/testfunction.hpp"

using nlohmann::json;
using namespace stableform;

namespace {

json run_header(const RunConfig& cfg) {
    json j;
    j["schema"] = kReportSchema;
    j["version"] = kEngineVersion;
    j["config"] = cfg.canonical_json();
    j["config_hash"] = config_hash(cfg.canonical_json());
    return j;
}

RateKind curve_kind_of(const std::string& name) {
    if (name == "super_t11") return RateKind::SuperBeta_T11;
    if (name == "weak_t11") return RateKind::WeakBeta_T11;
    if (name == "super_t51") return RateKind::SuperBeta_T51;
    return RateKind::WeakBeta_T52;
}

RateConstants constants_of(const RunConfig& cfg) {
    RateConstants k;
    k.c1 = cfg.c1;
    k.c2 = cfg.c2;
    k.c = cfg.c;
    k.delta = cfg.delta;
    return k;
}

json slope_json(const SlopeFit& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"residual_rms", f.residual_rms},
            {"points", f.points}};
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& rel) {
    return std::filesystem::path(cfg.out_dir) / rel;
}

json profile_tables(const CriterionProfile& prof, const RunConfig& cfg) {
    json t;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= 24; ++i) {
        const double r = 1e-2 * std::pow(10.0, 6.0 * i / 24.0);
        rows.push_back({r, prof.log_h(r), prof.log_H(r), prof.log_Phi(r),
                        prof.log_psi1(r), prof.log_psi2(r),
                        prof.w_delta(r, cfg.delta)});
    }
    write_csv(out_path(cfg, "profile_tables.csv").string(),
              {"r", "log_h", "log_H", "log_Phi", "log_psi1", "log_psi2", "W_delta"},
              rows);
    t["csv"] = "profile_tables.csv";
    t["phi0_log"] = prof.phi0_log();
    t["phi_unbounded"] = prof.phi_unbounded();
    t["ef_holds"] = prof.ef_holds(cfg.delta);
    t["min_V"] = prof.min_V();
    return t;
}

int run_criteria(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    json out = run_header(cfg);
    out["potential"] = mu.potential().describe();
    out["measure"] = {{"z_const", mu.z_const()}, {"z_est_error", mu.z_est_error()}};
    out["profile"] = profile_tables(prof, cfg);

    RateCurve curve = sample_engine_curve(curve_kind_of(cfg.curve.kind), prof,
                                          cfg.curve.r_lo, cfg.curve.r_hi,
                                          cfg.curve.points, constants_of(cfg));
    const std::string csv = "curves/" + curve.label + ".csv";
    write_curve_csv(out_path(cfg, csv).string(), curve);
    json jc = curve_to_json(curve);
    jc["csv"] = csv;
    out["curves"] = json::array({jc});
    write_json_file(out_path(cfg, "profile.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_beta(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    RateCurve curve = sample_engine_curve(curve_kind_of(cfg.curve.kind), prof,
                                          cfg.curve.r_lo, cfg.curve.r_hi,
                                          cfg.curve.points, constants_of(cfg));
    const std::string csv = "curves/" + curve.label + ".csv";
    write_curve_csv(out_path(cfg, csv).string(), curve);
    json out = run_header(cfg);
    out["curve"] = curve_to_json(curve);
    out["curve"]["csv"] = csv;
    write_json_file(out_path(cfg, "beta.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_gap(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    const auto mode = cfg.spectral.mode == "censored" ? spectral::BoundaryMode::Censored
                                                      : spectral::BoundaryMode::Killed;
    spectral::FormMatrix form =
        spectral::assemble(mu, cfg.alpha, cfg.spectral.R, cfg.spectral.n, mode);
    spectral::GapResult gap = spectral::spectral_gap(form);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < form.n(); ++i)
        rows.push_back({form.nodes[i], form.mu[i], gap.eigvec[i]});
    write_csv(out_path(cfg, "eigvec.csv").string(), {"x", "mu", "eigvec"}, rows);
    json out = run_header(cfg);
    out["gap"] = {{"lambda1", gap.lambda1},
                  {"lambda0", gap.lambda0},
                  {"rayleigh", gap.rayleigh},
                  {"n", cfg.spectral.n},
                  {"R", cfg.spectral.R},
                  {"mode", cfg.spectral.mode},
                  {"mu_mass", form.mu_mass()}};
    write_json_file(out_path(cfg, "gap.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_decay(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    spectral::FormMatrix form = spectral::assemble(mu, cfg.alpha, cfg.spectral.R,
                                                   cfg.spectral.n,
                                                   spectral::BoundaryMode::Censored);
    std::vector<double> f0 = form.sample(tanh_ramp(1.0));
    const double mean =
        form.mu_dot(f0, std::vector<double>(f0.size(), 1.0)) / form.mu_mass();
    for (auto& v : f0) v -= mean;
    spectral::DecayCurve curve = spectral::semigroup_decay(form, f0, cfg.spectral.times);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.t.size(); ++i)
        rows.push_back({curve.t[i], curve.variance[i]});
    write_csv(out_path(cfg, "decay.csv").string(), {"t", "variance"}, rows);
    spectral::GapResult gap = spectral::spectral_gap(form);
    json out = run_header(cfg);
    out["decay"] = {{"fitted_rate", curve.fitted_rate},
                    {"lambda1", gap.lambda1},
                    {"csv", "decay.csv"}};
    write_json_file(out_path(cfg, "decay.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_probe(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    spectral::FormMatrix form = spectral::assemble(mu, cfg.alpha, cfg.spectral.R,
                                                   cfg.spectral.n,
                                                   spectral::BoundaryMode::Censored);
    RateConstants k = constants_of(cfg);
    const RateKind kind = curve_kind_of(cfg.curve.kind);
    auto beta = [&](double r) {
        double lv = 0.0;
        switch (kind) {
            case RateKind::SuperBeta_T11: lv = beta_super_t11_log(prof, r, k.c1, k.c2); break;
            case RateKind::WeakBeta_T11: lv = beta_weak_t11_log(prof, r, k.c); break;
            case RateKind::SuperBeta_T51:
                lv = beta_super_t51_log(prof, k.delta, r, k.c1, k.c2);
                break;
            default: lv = beta_weak_t52_log(prof, r, k.c1, k.c2); break;
        }
        return lv > 690.0 ? 1e300 : std::exp(lv);
    };
    auto family = canonical_family(cfg.probe.family_size);
    spectral::ProbeReport rep =
        spectral::super_poincare_probe_fitted(form, beta, family, cfg.probe.r_grid);
    json out = run_header(cfg);
    json viol = json::array();
    for (const auto& v : rep.violations)
        viol.push_back({{"r", v.r}, {"fn", v.fn}, {"lhs", v.lhs}, {"rhs", v.rhs}});
    out["probe"] = {{"checks", rep.checks},
                    {"violations", viol},
                    {"fitted_c1", rep.fitted_c1},
                    {"beta_kind", cfg.curve.kind}};
    write_json_file(out_path(cfg, "probe.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_lyapunov(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    std::vector<double> grid;
    for (int i = 0; i < cfg.lyapunov.points; ++i)
        grid.push_back(cfg.lyapunov.x_min *
                       std::pow(cfg.lyapunov.x_max / cfg.lyapunov.x_min,
                                static_cast<double>(i) / (cfg.lyapunov.points - 1)));
    auto phi_fn = [&](double r) { return prof.Phi(r); };
    nonlocal::LyapunovReport rep =
        nonlocal::lyapunov_check(mu.potential(), cfg.alpha, cfg.alpha0_or_default(),
                                 grid, phi_fn, cfg.lyapunov.threshold);
    std::vector<std::vector<double>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({r.x, r.l_phi, r.capital_phi, r.phi, r.ratio});
    write_csv(out_path(cfg, "lyapunov.csv").string(),
              {"x", "L_phi", "Phi", "phi", "ratio"}, rows);
    json out = run_header(cfg);
    out["lyapunov"] = {{"alpha0", rep.alpha0},
                       {"success", rep.success},
                       {"r0_empirical", rep.r0_empirical},
                       {"inf_ratio_tail", rep.inf_ratio_tail},
                       {"sup_abs_lphi_inner", rep.sup_abs_lphi_inner},
                       {"threshold", rep.c1_threshold},
                       {"csv", "lyapunov.csv"}};
    write_json_file(out_path(cfg, "lyapunov.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_form(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    auto family = canonical_family(cfg.probe.family_size);
    json out = run_header(cfg);
    json rows = json::array();
    for (const auto& fn : family) {
        auto r = nonlocal::dirichlet_form(fn, fn, mu, cfg.alpha);
        rows.push_back({{"fn", fn.name}, {"energy", r.value}, {"est_error", r.est_error}});
    }
    out["dirichlet_forms"] = rows;
    write_json_file(out_path(cfg, "form.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_sharpness(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    const auto& nv = cfg.sharpness.n_values;
    json out = run_header(cfg);
    std::vector<std::vector<double>> rows;

    if (cfg.sharpness.corollary == "1.2") {
        sharpness::DisproofReport dis = sharpness::poincare_disproof(mu, cfg.alpha, nv);
        for (const auto& r : dis.rows)
            rows.push_back({r.n, r.energy, r.variance, r.ratio});
        write_csv(out_path(cfg, "sharpness.csv").string(),
                  {"n", "energy", "variance", "ratio"}, rows);
        out["disproof"] = {{"ratio_slope", slope_json(dis.ratio_slope)},
                           {"min_ratio", dis.min_ratio},
                           {"max_ratio", dis.max_ratio}};
        const double eps = mu.potential().eps();
        if (eps > 0.0 && eps < cfg.alpha) {
            auto lb = [&](double r) { return beta_weak_t11_log(prof, r, cfg.c); };
            sharpness::SharpnessReport rep = sharpness::wp_sharpness(
                mu, cfg.alpha, eps, lb, nv, sharpness::WpFunctional::Cor12_3);
            out["wp_sharpness"] = {{"running_liminf", rep.running_liminf},
                                   {"flagged_too_small", rep.flagged_too_small}};
        }
    } else if (cfg.sharpness.corollary == "1.3") {
        auto lb = [&](double r) { return beta_super_t11_log(prof, r, cfg.c1, cfg.c2); };
        sharpness::SharpnessReport rep = sharpness::sp_sharpness_cor13(
            mu, cfg.alpha, mu.potential().eps(), lb, nv);
        for (const auto& r : rep.rows) rows.push_back({r.n, r.r_n, r.functional});
        write_csv(out_path(cfg, "sharpness.csv").string(), {"n", "r_n", "functional"},
                  rows);
        out["sp_sharpness"] = {{"c1_hat", rep.c1_hat},
                               {"c_hat", rep.c_hat},
                               {"running_liminf", rep.running_liminf},
                               {"flagged_too_small", rep.flagged_too_small}};
    } else {
        auto lb = [&](double r) { return beta_weak_t11_log(prof, r, cfg.c); };
        sharpness::SharpnessReport rep = sharpness::wp_sharpness(
            mu, cfg.alpha, mu.potential().eps(), lb, nv, sharpness::WpFunctional::Cor14);
        for (const auto& r : rep.rows) rows.push_back({r.n, r.r_n, r.functional});
        write_csv(out_path(cfg, "sharpness.csv").string(), {"n", "r_n", "functional"},
                  rows);
        out["wp_sharpness"] = {{"running_liminf", rep.running_liminf},
                               {"flagged_too_small", rep.flagged_too_small}};
    }
    write_json_file(out_path(cfg, "sharpness.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int run_report(const RunConfig& cfg) {
    Measure mu = cfg.make_measure();
    CriterionProfile prof = build_profile(mu, cfg.alpha);
    json out = run_header(cfg);
    out["potential"] = mu.potential().describe();
    out["measure"] = {{"z_const", mu.z_const()}, {"z_est_error", mu.z_est_error()}};
    out["profile"] = profile_tables(prof, cfg);

    double quad_err_max = mu.z_est_error();
    json checks;
    checks["poincare"] = {{"applicable", std::isfinite(prof.phi0_log())},
                          {"phi0_log", prof.phi0_log()},
                          {"phi0_positive", prof.phi0_log() > -700.0}};

    json curves = json::array();
    json super_p;
    super_p["applicable"] = prof.phi_unbounded();
    if (prof.phi_unbounded()) {
        RateCurve c = sample_engine_curve(RateKind::SuperBeta_T11, prof, cfg.curve.r_lo,
                                          cfg.curve.r_hi, cfg.curve.points,
                                          constants_of(cfg));
        const std::string csv = "curves/" + c.label + ".csv";
        write_curve_csv(out_path(cfg, csv).string(), c);
        super_p["slope"] = c.loglog_fit.slope;
        json jc = curve_to_json(c);
        jc["csv"] = csv;
        curves.push_back(jc);
    }
    checks["super_poincare"] = super_p;

    {
        RateCurve w = sample_engine_curve(RateKind::WeakBeta_T11, prof, cfg.curve.r_lo,
                                          cfg.curve.r_hi,
                                          std::min(cfg.curve.points, 24),
                                          constants_of(cfg));
        const std::string csv = "curves/" + w.label + ".csv";
        write_curve_csv(out_path(cfg, csv).string(), w);
        json jw = curve_to_json(w);
        jw["csv"] = csv;
        curves.push_back(jw);
        checks["weak_poincare"] = {{"slope", w.loglog_fit.slope}};
    }

    json t51;
    t51["applicable"] = prof.ef_holds(cfg.delta) && prof.min_V() >= -1e-9;
    if (t51["applicable"].get<bool>()) {
        RateCurve c = sample_engine_curve(RateKind::SuperBeta_T51, prof, cfg.curve.r_lo,
                                          cfg.curve.r_hi, cfg.curve.points,
                                          constants_of(cfg));
        const std::string csv = "curves/" + c.label + ".csv";
        write_curve_csv(out_path(cfg, csv).string(), c);
        json jc = curve_to_json(c);
        jc["csv"] = csv;
        curves.push_back(jc);
        t51["log_slope"] = fit_growth(c, GrowthFunctional::LogLogVsLogR, cfg.curve.r_lo,
                                      cfg.curve.r_hi)
                               .slope;
    }
    checks["t51"] = t51;

    out["checks"] = checks;
    out["curves"] = curves;
    out["quadrature_errors"] = {{"z_est_error", mu.z_est_error()},
                                {"max_tracked", quad_err_max}};
    write_json_file(out_path(cfg, "report.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

struct CompareArgs {
    std::string curve_a, curve_b;
    double r_lo = 0.0, r_hi = kInf;
    std::string functional = "loglog";
};

int run_compare(const RunConfig& cfg, const CompareArgs& args) {
    RateCurve a = read_curve_csv(args.curve_a);
    RateCurve b = read_curve_csv(args.curve_b);
    const auto g = args.functional == "logloglog" ? GrowthFunctional::LogLogVsLogR
                                                  : GrowthFunctional::LogVsLogR;
    CompareResult res = compare_curves(a, b, args.r_lo, args.r_hi, g);
    json out = run_header(cfg);
    out["compare"] = {{"curve_a", args.curve_a},   {"curve_b", args.curve_b},
                      {"slope_a", res.slope_a},    {"slope_b", res.slope_b},
                      {"slope_diff", res.slope_diff},
                      {"max_log_ratio", res.max_log_ratio},
                      {"window", {res.window_lo, res.window_hi}},
                      {"functional", args.functional}};
    write_json_file(out_path(cfg, "compare.json").string(), out);
    std::cout << dump_pinned(out);
    return 0;
}

int error_exit(const RunConfig* cfg, int code, const char* kind, const std::string& msg) {
    json err;
    err["error"] = {{"code", code}, {"kind", kind}, {"message", msg}};
    std::cout << dump_pinned(err);
    if (cfg) {
        try {
            write_json_file(out_path(*cfg, "error.json").string(), err);
        } catch (...) {
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poincare-type inequality toolkit for stable-like Dirichlet forms"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");

    // flag overrides (flags win over the config file)
    std::optional<std::string> family, expr, out_dir, curve_kind, mode, corollary;
    std::optional<double> eps, alpha, pot_alpha, r_lo, r_hi, R, delta, alpha0, c1, c2, cc;
    std::optional<int> dim, points, n_cells;
    std::optional<unsigned long long> seed;
    app.add_option("--family", family, "potential family");
    app.add_option("--eps", eps, "family parameter epsilon");
    app.add_option("--dim", dim, "dimension d");
    app.add_option("--alpha", alpha, "stability index alpha in (0,2)");
    app.add_option("--pot-alpha", pot_alpha, "PolyLogTail leading coefficient");
    app.add_option("--expr", expr, "custom potential expression in |x|");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--kind", curve_kind, "rate engine: super_t11|weak_t11|super_t51|weak_t52");
    app.add_option("--r-lo", r_lo, "curve window lower end");
    app.add_option("--r-hi", r_hi, "curve window upper end");
    app.add_option("--points", points, "curve sample count");
    app.add_option("--R", R, "spectral window half-width");
    app.add_option("--n", n_cells, "spectral grid cells");
    app.add_option("--mode", mode, "boundary mode: censored|killed");
    app.add_option("--delta", delta, "W_delta parameter in (0,1)");
    app.add_option("--alpha0", alpha0, "Lyapunov exponent in (0, min(1, alpha))");
    app.add_option("--c1", c1, "rate constant c1");
    app.add_option("--c2", c2, "rate constant c2");
    app.add_option("--c", cc, "rate constant c");
    app.add_option("--corollary", corollary, "sharpness corollary: 1.2|1.3|1.4");
    app.add_option("--seed", seed, "seed recorded in reports");

    CompareArgs cmp;
    for (const char* name : {"criteria", "beta", "gap", "decay", "probe", "lyapunov",
                             "sharpness", "report", "form"})
        app.add_subcommand(name);
    CLI::App* sc_cmp = app.add_subcommand("compare");
    sc_cmp->add_option("curve_a", cmp.curve_a, "first curve CSV")->required();
    sc_cmp->add_option("curve_b", cmp.curve_b, "second curve CSV")->required();
    sc_cmp->add_option("--window-lo", cmp.r_lo, "comparison window lower end");
    sc_cmp->add_option("--window-hi", cmp.r_hi, "comparison window upper end");
    sc_cmp->add_option("--functional", cmp.functional, "loglog|logloglog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        json err;
        err["error"] = {{"code", 2}, {"kind", "ConfigError"}, {"message", e.what()}};
        std::cout << dump_pinned(err);
        return 2;
    }

    RunConfig cfg;
    bool have_cfg = false;
    try {
        json raw = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file " + config_path);
            try {
                in >> raw;
            } catch (const json::exception& e) {
                throw ConfigError("config parse failure: " + std::string(e.what()));
            }
        }
        // flags win
        if (family) raw["potential"]["family"] = *family;
        if (eps) raw["potential"]["eps"] = *eps;
        if (dim) raw["potential"]["dim"] = *dim;
        if (pot_alpha) raw["potential"]["alpha"] = *pot_alpha;
        if (expr) raw["potential"]["expr"] = *expr;
        if (alpha) raw["alpha"] = *alpha;
        if (out_dir) raw["out_dir"] = *out_dir;
        if (curve_kind) raw["curve"]["kind"] = *curve_kind;
        if (r_lo) raw["curve"]["r_lo"] = *r_lo;
        if (r_hi) raw["curve"]["r_hi"] = *r_hi;
        if (points) raw["curve"]["points"] = *points;
        if (R) raw["spectral"]["R"] = *R;
        if (n_cells) raw["spectral"]["n"] = *n_cells;
        if (mode) raw["spectral"]["mode"] = *mode;
        if (delta) raw["delta"] = *delta;
        if (alpha0) raw["alpha0"] = *alpha0;
        if (c1) raw["c1"] = *c1;
        if (c2) raw["c2"] = *c2;
        if (cc) raw["c"] = *cc;
        if (corollary) raw["sharpness"]["corollary"] = *corollary;
        if (seed) raw["seed"] = *seed;
        raw["engine"] = app.get_subcommands().front()->get_name();
        cfg = parse_config(raw);
        have_cfg = true;

        const std::string engine = cfg.engine;
        if (engine == "criteria") return run_criteria(cfg);
        if (engine == "beta") return run_beta(cfg);
        if (engine == "gap") return run_gap(cfg);
        if (engine == "decay") return run_decay(cfg);
        if (engine == "probe") return run_probe(cfg);
        if (engine == "lyapunov") return run_lyapunov(cfg);
        if (engine == "sharpness") return run_sharpness(cfg);
        if (engine == "form") return run_form(cfg);
        if (engine == "compare") return run_compare(cfg, cmp);
        return run_report(cfg);
    } catch (const ConfigError& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 2, "ConfigError", e.what());
    } catch (const InvalidParam& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 2, "InvalidParam", e.what());
    } catch (const DisjointWindows& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 2, "DisjointWindows", e.what());
    } catch (const CriterionInapplicable& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 4, "CriterionInapplicable", e.what());
    } catch (const NonIntegrable& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 3, "NonIntegrable", e.what());
    } catch (const QuadDiverged& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 3, "QuadDiverged", e.what());
    } catch (const SolverFailure& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 3, "SolverFailure", e.what());
    } catch (const GridTooCoarse& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 3, "GridTooCoarse", e.what());
    } catch (const std::exception& e) {
        return error_exit(have_cfg ? &cfg : nullptr, 3, "Error", e.what());
    }
}
