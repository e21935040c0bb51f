#include "cli.h"
#include "json_out.h"

#include "ckn/error.h"
#include "ckn/extremals.h"
#include "ckn/fiber.h"
#include "ckn/functionals.h"
#include "ckn/grid.h"
#include "ckn/params.h"
#include "ckn/solver.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace ckn::cli {

namespace {

struct Options {
    std::string config_path;
    std::optional<int> N;
    std::optional<double> a, b, q, beta, rho, beta_fraction;
    std::optional<double> s_min, s_max;
    std::optional<int> n;
    std::optional<int> max_iters;
    std::optional<double> step0, tol_P, tol_EL, tol_m, seed_eps, seed_R;
    std::optional<std::string> seed_profile, branch, output_dir;
    std::uint64_t seed = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool quiet = false;
    std::string eps_list;

    std::string quantity = "MassSq";
    int resolution = 400;
    std::string profile, ground;
    double eps = 1e-3;
    double t_max = 10.0;
    int n_t = 401;
    double cutoff_R = 1.0;
    bool boundary_branch = false;
    bool no_strict = false;
    std::optional<double> beta1_est;
    std::string vary, values, task = "minimize_plus";
};

enum class GridDefault { Standard, Wide };

struct Run {
    ProblemParams p;
    SolverConfig solver;
    std::optional<SweepGrid> grid;
    std::optional<std::string> output_dir;
    Json config;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream is(item);
        is.imbue(std::locale::classic());
        double x;
        if (!(is >> x)) throw Error(ErrorCode::BadInput, "not a number: " + item);
        v.push_back(x);
    }
    return v;
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open config " + path);
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::BadInput, std::string("config is not valid JSON: ") + e.what());
    }
}

template <class T>
T pick(const std::optional<T>& flag, const Json& block, const char* key, T fallback) {
    if (flag) return *flag;
    if (block.is_object() && block.contains(key)) return block.at(key).get<T>();
    return fallback;
}

std::pair<double, Thresholds> beta_star_of(const ProblemParams& p, std::uint64_t seed);

Run resolve(const Options& o) {
    Run run;
    run.config = load_config(o.config_path);
    const Json& cfg = run.config;
    Json params = cfg.value("params", Json::object());
    Json grid = cfg.value("grid", Json::object());
    Json solver = cfg.value("solver", Json::object());

    double N = o.N ? *o.N : params.value("N", 3.0);
    ProblemParams defaults;
    run.p = validate(N, pick(o.a, params, "a", defaults.a), pick(o.b, params, "b", defaults.b),
                     pick(o.q, params, "q", defaults.q), pick(o.beta, params, "beta", defaults.beta),
                     pick(o.rho, params, "rho", defaults.rho));
    std::optional<double> frac = o.beta_fraction;
    if (!frac && !o.beta && params.contains("beta_fraction")) frac = params.at("beta_fraction").get<double>();
    if (frac) {
        if (!(*frac >= 0.0)) throw Error(ErrorCode::NegativeCoupling, "beta_fraction must be >= 0");
        run.p.beta = *frac * beta_star_of(run.p, o.seed).first;
        validate(run.p);
    }

    if (o.s_min || o.s_max || o.n || !grid.empty()) {
        SweepGrid g;
        g.s_min = pick(o.s_min, grid, "s_min", std::log(1e-6));
        g.s_max = pick(o.s_max, grid, "s_max", std::log(1e3));
        g.n = pick(o.n, grid, "n", 2048);
        run.grid = g;
    }

    SolverConfig& sc = run.solver;
    sc.max_iters = pick(o.max_iters, solver, "max_iters", sc.max_iters);
    sc.step0 = pick(o.step0, solver, "step0", sc.step0);
    sc.tol_P = pick(o.tol_P, solver, "tol_P", sc.tol_P);
    sc.tol_EL = pick(o.tol_EL, solver, "tol_EL", sc.tol_EL);
    sc.tol_m = pick(o.tol_m, solver, "tol_m", sc.tol_m);
    sc.seed_eps = pick(o.seed_eps, solver, "seed_eps", sc.seed_eps);
    sc.seed_cutoff_R = pick(o.seed_R, solver, "seed_cutoff_R", sc.seed_cutoff_R);
    sc.branch = parse_branch(pick(o.branch, solver, "branch", std::string("Plus")));
    std::string seed_default = sc.branch == Branch::Minus ? "Bubble" : "Gaussian";
    sc.seed_profile = parse_seed_profile(pick(o.seed_profile, solver, "seed_profile", seed_default));
    if (sc.seed_profile == SeedProfile::Custom)
        throw Error(ErrorCode::BadInput, "custom seeds are only available through the library");
    validate(sc);

    if (o.output_dir)
        run.output_dir = *o.output_dir;
    else if (cfg.contains("output_dir"))
        run.output_dir = cfg.at("output_dir").get<std::string>();
    else if (const char* env = std::getenv("CKN_OUTPUT_DIR"); env && *env)
        run.output_dir = std::string(env);
    return run;
}

GridPtr grid_for(const Run& run, GridDefault d) {
    if (run.grid) return make_grid(run.grid->s_min, run.grid->s_max, run.grid->n, run.p.N);
    return d == GridDefault::Wide ? wide_grid(run.p.N) : default_grid(run.p.N);
}

SweepGrid sweep_grid_for(const Run& run, GridDefault d) {
    if (run.grid) return *run.grid;
    GridPtr g = d == GridDefault::Wide ? wide_grid(run.p.N) : default_grid(run.p.N);
    return {g->s_min, g->s_max, g->n};
}

std::string write_output(const Run& run, const std::string& name, const std::string& content) {
    if (!run.output_dir) return {};
    std::filesystem::create_directories(*run.output_dir);
    auto path = std::filesystem::path(*run.output_dir) / name;
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::BadInput, "cannot write " + path.string());
    f << content;
    return path.string();
}

double S_of(const ProblemParams& p) { return best_constant_S(p, constants_grid(p)); }

double C_of(const ProblemParams& p, std::uint64_t seed) { return interp_constant_C(p, default_grid(p.N), seed).C; }

std::pair<double, Thresholds> beta_star_of(const ProblemParams& p, std::uint64_t seed) {
    ProblemParams probe = p;
    probe.beta = 1.0;
    Thresholds th = thresholds(probe, S_of(probe), C_of(probe, seed));
    Exponents ex = derive_exponents(p);
    if (ex.regime == Regime::Subcritical) return {th.beta_star_sub, th};
    if (th.beta_star_crit.is_unbounded())
        throw Error(ErrorCode::BadInput, "beta* is unbounded here; give beta directly");
    return {th.beta_star_crit.value(), th};
}

Json params_json(const ProblemParams& p) {
    return Json{{"N", p.N}, {"a", p.a}, {"b", p.b}, {"q", p.q}, {"beta", p.beta}, {"rho", p.rho}};
}

Json coefficients_json(const FiberCoefficients& c) {
    return Json{{"A_grad", c.A_grad}, {"B_q", c.B_q}, {"C_crit", c.C_crit}};
}

Json report_json(const SolutionReport& s) {
    bool monotone = true;
    for (std::size_t i = 1; i < s.energy_history.size(); ++i)
        if (s.energy_history[i] > s.energy_history[i - 1]) monotone = false;
    return Json{{"converged", s.converged},
                {"iterations", s.iterations},
                {"energy", s.energy},
                {"lambda_rayleigh", s.lambda},
                {"lambda_pohozaev", s.lambda_pohozaev},
                {"mass_sq", s.mass_sq},
                {"pohozaev", s.pohozaev},
                {"el_residual", s.el_residual},
                {"grad_norm", s.grad_norm},
                {"coefficients", coefficients_json(s.coefficients)},
                {"left_ball_events", s.left_ball_events},
                {"energy_monotone", monotone},
                {"warnings", s.warnings}};
}

Json level_json(const LevelReport& lr) {
    Json checks = Json::array();
    for (const auto& b : lr.bound_check)
        checks.push_back(Json{{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"holds", b.holds}});
    Json diag = Json::object();
    for (const auto& [k, v] : lr.diagnostics) diag[k] = v;
    return Json{{"level_value", lr.level_value}, {"bound_check", checks}, {"diagnostics", diag}};
}

bool all_hold(const std::vector<BoundCheck>& checks) {
    for (const auto& b : checks)
        if (!b.holds) return false;
    return true;
}

std::string quiet_line(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s + "\n";
}

void fail_checks(const std::vector<BoundCheck>& checks) {
    for (const auto& b : checks)
        if (!b.holds) throw Error(ErrorCode::StructureViolation, "postcondition failed: " + b.name);
}

int cmd_exponents(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    Exponents ex = derive_exponents(run.p);
    if (o.quiet) {
        out << quiet_line({ex.d, ex.two_sharp, ex.delta_q, ex.q_c, ex.alpha_bubble, ex.A_bubble});
        return 0;
    }
    Json j{{"params", params_json(run.p)},
           {"d", ex.d},
           {"two_sharp", ex.two_sharp},
           {"delta_q", ex.delta_q},
           {"q_delta_q", run.p.q * ex.delta_q},
           {"q_c", ex.q_c},
           {"tail_threshold_q", tail_threshold_q(run.p.N, run.p.a, run.p.b)},
           {"alpha_bubble", ex.alpha_bubble},
           {"A_bubble", ex.A_bubble},
           {"regime", regime_name(ex.regime)}};
    out << dump(j);
    return 0;
}

int cmd_constants(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    const ProblemParams& p = run.p;
    auto cg = constants_grid(p);
    double S = best_constant_S(p, cg);

    std::vector<double> eps = o.eps_list.empty() ? std::vector<double>{0.5, 1.0, 2.0} : parse_list(o.eps_list);
    Json inv = Json::array();
    double dev = 0.0;
    for (double e : eps) {
        double v = bubble_quotient(p, cg, e);
        dev = std::max(dev, std::abs(v - S) / S);
        inv.push_back(Json{{"eps", e}, {"S", v}});
    }
    DescentResult desc = rayleigh_descent_S(p, cg);

    GridPtr grid = grid_for(run, GridDefault::Standard);
    InterpConstant C = interp_constant_C(p, grid, o.seed);
    ProblemParams probe = p;
    if (probe.beta == 0.0) probe.beta = 1.0;
    Thresholds th = thresholds(probe, S, C.C);
    Exponents ex = derive_exponents(p);

    Json thj{{"label", "estimated"},
             {"beta1", th.beta1},
             {"beta2", th.beta2},
             {"beta_star_subcritical", th.beta_star_sub},
             {"beta1_envelope", th.beta1_envelope},
             {"beta_star_case", th.beta_star_case}};
    if (th.beta_star_crit.is_unbounded())
        thj["beta_star"] = "unbounded";
    else
        thj["beta_star"] = th.beta_star_crit.value();
    thj["n3_extra_condition_applies"] = th.n3_extra_condition_applies;
    thj["n3_extra_condition_met"] = th.n3_extra_condition_met;

    Json j{{"params", params_json(p)},
           {"S_ab", S},
           {"dN_S_pow", ex.d / p.N * std::pow(S, p.N / (2.0 * ex.d))},
           {"S_eps_invariance", Json{{"values", inv}, {"max_rel_dev", dev}}},
           {"S_descent", Json{{"S", desc.S},
                              {"rel_diff", std::abs(desc.S - S) / S},
                              {"iterations", desc.iterations},
                              {"converged", desc.converged}}},
           {"C_ab", C.C},
           {"C_ab_q", C.Cq},
           {"C_ab_label", "estimated: radial test family plus Petviashvili ascent"},
           {"C_family_lower_bound", C.family_lower_bound},
           {"C_family_best", C.family_best},
           {"thresholds", thj}};
    if (ex.regime == Regime::Subcritical && p.beta > 0.0) {
        try {
            EnvelopeReport env = envelope(p, S, C.C);
            j["envelope"] = Json{{"t_tilde", env.t_tilde},
                                 {"h_max", env.h_max},
                                 {"K", env.K},
                                 {"kappa_tilde", env.kappa_tilde},
                                 {"kappa_hat", env.kappa_hat},
                                 {"positive_interval_nonempty", env.positive_interval_nonempty}};
        } catch (const Error& e) {
            j["envelope"] = Json{{"error", e.name()}, {"message", e.what()}};
        }
    }
    if (o.quiet) {
        double bs = ex.regime == Regime::Subcritical ? th.beta_star_sub
                    : th.beta_star_crit.is_unbounded() ? INFINITY
                                                       : th.beta_star_crit.value();
        out << quiet_line({S, C.C, th.beta1, th.beta2, bs});
        return 0;
    }
    out << dump(j);
    return 0;
}

int cmd_fiber(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    RadialFunction u = o.profile.empty() ? sample(grid_for(run, GridDefault::Standard), [](double r) { return std::exp(-r * r); })
                                         : read_csv(o.profile, run.p.N);
    FiberReport fr = analyze_fiber(u, run.p, o.beta1_est);
    Json crit = Json::array();
    for (const auto& c : fr.criticals)
        crit.push_back(Json{{"t", c.t}, {"phi", c.phi}, {"phi2", c.phi2}, {"branch", branch_name(c.branch)}});
    Json j{{"params", params_json(run.p)},
           {"A", fr.coefficients.A_grad},
           {"B", fr.coefficients.B_q},
           {"C", fr.coefficients.C_crit},
           {"regime", regime_name(fr.regime)},
           {"criticals", crit},
           {"zeros", fr.zeros},
           {"structure_ok", fr.structure_ok},
           {"structure_label", fr.structure_label}};
    out << dump(j);
    if (fr.structure_label == "violated") throw Error(ErrorCode::StructureViolation, "fiber structure contradicts the regime");
    return 0;
}

// Plus-branch ground state with the envelope ball, shared by solve and gap-check
SolutionReport ground_state(const Run& run, const GridPtr& grid, double S, double C, std::optional<double>& kappa) {
    EnvelopeReport env = envelope(run.p, S, C);
    kappa = env.kappa_tilde > 0.0 ? std::optional<double>(env.kappa_tilde) : std::nullopt;
    SolverConfig cfg = run.solver;
    cfg.branch = Branch::Plus;
    return minimize_plus(run.p, cfg, grid, kappa);
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
    Run run = resolve(o);
    const ProblemParams& p = run.p;
    Exponents ex = derive_exponents(p);
    const bool plus = run.solver.branch == Branch::Plus;
    GridPtr grid = grid_for(run, plus ? GridDefault::Standard : GridDefault::Wide);
    double S = S_of(p);

    Json j{{"params", params_json(p)}, {"branch", branch_name(run.solver.branch)}};
    std::vector<BoundCheck> checks;
    SolutionReport rep;
    std::optional<SolverError> failure;
    try {
        if (plus) {
            double C = C_of(p, o.seed);
            ProblemParams probe = p;
            Thresholds th = thresholds(probe, S, C);
            if (!(p.beta < 0.95 * th.beta_star_sub))
                throw Error(ErrorCode::BadInput, "beta must stay below 0.95 beta_* = " + format_double(0.95 * th.beta_star_sub));
            std::optional<double> kappa;
            rep = ground_state(run, grid, S, C, kappa);
            checks.push_back({"energy < 0", rep.energy, 0.0, rep.energy < 0.0});
            checks.push_back({"lambda < 0", rep.lambda, 0.0, rep.lambda < 0.0});
            if (kappa) checks.push_back({"grad_norm < kappa_tilde", rep.grad_norm, *kappa, rep.grad_norm < *kappa});
            double rel = std::abs(rep.lambda - rep.lambda_pohozaev) / std::abs(rep.lambda);
            checks.push_back({"lambda identities agree (rel)", rel, 1e-3, rel <= 1e-3});
            LevelReport lr;
            lr.level_value = rep.energy;
            lr.bound_check = checks;
            j["level"] = level_json(lr);
        } else {
            std::optional<double> m;
            if (ex.regime == Regime::Subcritical && p.beta > 0.0) {
                try {
                    std::optional<double> kappa;
                    m = ground_state(run, grid, S, C_of(p, o.seed), kappa).energy;
                } catch (const Error& e) {
                    err << "note: no M+ level for the gap bracket (" << e.name() << ")\n";
                }
            }
            MinusResult mr = minimize_minus(p, run.solver, grid, S, m);
            rep = mr.solution;
            checks = mr.level.bound_check;
            j["level"] = level_json(mr.level);
        }
    } catch (const SolverError& e) {
        rep = e.partial();
        failure = e;
        if (!plus) j["level"] = level_json(level_report(rep, p, S, std::nullopt));
    }
    j["report"] = report_json(rep);
    std::string path = write_output(run, std::string("profile_") + (plus ? "plus" : "minus") + ".csv", to_csv(rep.profile));
    j["profile_path"] = path.empty() ? Json(nullptr) : Json(path);
    out << dump(j);
    if (failure) throw *failure;
    fail_checks(checks);
    return 0;
}

int cmd_asymptotics(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    Quantity qty = parse_quantity(o.quantity);
    std::vector<double> eps = o.eps_list.empty() ? default_eps_list() : parse_list(o.eps_list);
    GridPtr grid = grid_for(run, GridDefault::Wide);
    AsymptoticsFit fit = measure_asymptotics(qty, run.p, eps, grid, !o.no_strict, o.cutoff_R, o.boundary_branch);
    if (o.quiet) {
        out << quiet_line({fit.prediction.exponent, fit.fit.slope, fit.fit.r2});
        return 0;
    }
    Json j{{"quantity", quantity_name(qty)},
           {"params", params_json(run.p)},
           {"case_label", fit.prediction.case_label},
           {"predicted_exponent", fit.prediction.exponent},
           {"predicted_log", fit.prediction.log_power},
           {"fitted_slope", fit.fit.slope},
           {"r2", fit.fit.r2},
           {"rms", fit.fit.rms},
           {"log_regressor_used", fit.log_used},
           {"plain_slope", fit.plain.slope},
           {"plain_r2", fit.plain.r2},
           {"plain_rms", fit.plain.rms},
           {"eps_list", fit.eps},
           {"values", fit.values}};
    out << dump(j);
    return 0;
}

int cmd_region_map(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    std::string csv = region_map_csv(region_map(run.p.N, o.resolution));
    write_output(run, "region_map_N" + std::to_string(run.p.N) + ".csv", csv);
    out << csv;
    return 0;
}

int cmd_gap_check(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    const ProblemParams& p = run.p;
    double S = S_of(p);
    SolutionReport ground;
    if (!o.ground.empty()) {
        ground = evaluate(read_csv(o.ground, p.N), p);
    } else {
        std::optional<double> kappa;
        ground = ground_state(run, grid_for(run, GridDefault::Wide), S, C_of(p, o.seed), kappa);
    }
    std::vector<double> eps = o.eps_list.empty() ? std::vector<double>{o.eps} : parse_list(o.eps_list);
    Json runs = Json::array();
    std::vector<BoundCheck> checks;
    for (double e : eps) {
        LevelReport lr = energy_gap_check(p, ground, e, S, o.t_max, o.n_t, o.cutoff_R);
        runs.push_back(level_json(lr));
        if (e == eps.front()) checks = lr.bound_check;
    }
    Json j{{"params", params_json(p)}, {"ground_energy", ground.energy}, {"ground_el_residual", ground.el_residual}};
    if (runs.size() == 1)
        j["level"] = runs[0];
    else
        j["eps_sweep"] = runs;
    out << dump(j);
    fail_checks(checks);
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    Run run = resolve(o);
    SweepTask task = parse_sweep_task(o.task);
    SolverConfig cfg = run.solver;
    cfg.branch = task == SweepTask::MinimizePlus ? Branch::Plus : Branch::Minus;
    if (!o.seed_profile) cfg.seed_profile = task == SweepTask::MinimizePlus ? SeedProfile::Gaussian : SeedProfile::Bubble;
    SweepGrid g = sweep_grid_for(run, task == SweepTask::MinimizePlus ? GridDefault::Standard : GridDefault::Wide);
    std::string csv = sweep(run.p, o.vary, parse_list(o.values), task, cfg, g, o.threads);
    write_output(run, "sweep.csv", csv);
    out << csv;
    return 0;
}

void common_options(CLI::App* c, Options& o) {
    c->add_option("--config", o.config_path, "JSON run configuration");
    c->add_option("--N", o.N, "dimension");
    c->add_option("--a", o.a);
    c->add_option("--b", o.b);
    c->add_option("--q", o.q);
    c->add_option("--beta", o.beta);
    c->add_option("--beta-fraction", o.beta_fraction, "beta as a multiple of the estimated beta_*");
    c->add_option("--rho", o.rho);
    c->add_option("--s-min", o.s_min);
    c->add_option("--s-max", o.s_max);
    c->add_option("--n", o.n, "grid nodes");
    c->add_option("--max-iters", o.max_iters);
    c->add_option("--step0", o.step0);
    c->add_option("--tol-P", o.tol_P);
    c->add_option("--tol-EL", o.tol_EL);
    c->add_option("--tol-m", o.tol_m);
    c->add_option("--seed-profile", o.seed_profile, "Gaussian or Bubble");
    c->add_option("--seed-eps", o.seed_eps);
    c->add_option("--seed-R", o.seed_R);
    c->add_option("--output-dir", o.output_dir);
    c->add_option("--seed", o.seed, "multistart RNG seed");
    c->add_option("--threads", o.threads, "sweep parallelism");
    c->add_flag("--quiet", o.quiet, "values only");
    c->add_option("--eps-list", o.eps_list, "comma separated eps values");
}

int exit_code(ErrorCode c) {
    switch (error_kind(c)) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::Numeric: return 3;
    case ErrorKind::NonConvergence: return 4;
    }
    return 3;
}

void report_error(std::ostream& err, const std::string& name, const std::string& msg, int code) {
    err << dump(Json{{"error", name}, {"message", msg}, {"exit_code", code}});
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weighted CKN normalized-solution laboratory", "ckn"};
    app.require_subcommand(1);
    Options o;

    auto* exps = app.add_subcommand("exponents", "derived exponents and regime");
    auto* cons = app.add_subcommand("constants", "S(a,b), C_ab and the beta thresholds");
    auto* fib = app.add_subcommand("fiber", "fiber map analysis of a profile");
    auto* solve = app.add_subcommand("solve", "constrained ground state on M+ or M-");
    auto* asy = app.add_subcommand("asymptotics", "cutoff-bubble eps asymptotics");
    auto* reg = app.add_subcommand("region-map", "(a,b) strip classification raster");
    auto* gap = app.add_subcommand("gap-check", "energy gap with the bubble competitor");
    auto* swp = app.add_subcommand("sweep", "parameter sweep of a solver task");
    for (auto* c : {exps, cons, fib, solve, asy, reg, gap, swp}) common_options(c, o);
    solve->add_option("--branch", o.branch, "Plus or Minus");
    fib->add_option("--profile", o.profile, "profile CSV (r,u)");
    fib->add_option("--beta1-est", o.beta1_est);
    asy->add_option("--quantity", o.quantity);
    asy->add_option("--R", o.cutoff_R);
    asy->add_flag("--boundary-branch", o.boundary_branch);
    asy->add_flag("--no-strict", o.no_strict);
    reg->add_option("--resolution", o.resolution);
    gap->add_option("--ground", o.ground, "ground-state CSV");
    gap->add_option("--eps", o.eps);
    gap->add_option("--t-max", o.t_max);
    gap->add_option("--n-t", o.n_t);
    gap->add_option("--R", o.cutoff_R);
    swp->add_option("--vary", o.vary)->required();
    swp->add_option("--values", o.values, "comma separated");
    swp->add_option("--task", o.task);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        report_error(err, "BadInput", e.what(), 2);
        return 2;
    }

    try {
        if (*exps) return cmd_exponents(o, out);
        if (*cons) return cmd_constants(o, out);
        if (*fib) return cmd_fiber(o, out);
        if (*solve) return cmd_solve(o, out, err);
        if (*asy) return cmd_asymptotics(o, out);
        if (*reg) return cmd_region_map(o, out);
        if (*gap) return cmd_gap_check(o, out);
        if (*swp) return cmd_sweep(o, out);
    } catch (const SolverError& e) {
        int code = exit_code(e.code());
        err << dump(Json{{"error", e.name()},
                         {"message", e.what()},
                         {"exit_code", code},
                         {"partial", Json{{"energy", e.partial().energy},
                                          {"el_residual", e.partial().el_residual},
                                          {"iterations", e.partial().iterations}}}});
        return code;
    } catch (const Error& e) {
        int code = exit_code(e.code());
        report_error(err, e.name(), e.what(), code);
        return code;
    } catch (const nlohmann::json::exception& e) {
        report_error(err, "BadInput", e.what(), 2);
        return 2;
    } catch (const std::exception& e) {
        report_error(err, "Internal", e.what(), 3);
        return 3;
    }
    return 2;
}

} // namespace ckn::cli
