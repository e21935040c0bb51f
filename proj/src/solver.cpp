#include "ckn/solver.h"
#include "ckn/detail/operators.h"
#include "ckn/extremals.h"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <locale>
#include <set>
#include <sstream>
#include <thread>

namespace ckn {

using detail::SpMat;
using detail::Vec;

const char* seed_profile_name(SeedProfile s) {
    switch (s) {
    case SeedProfile::Gaussian: return "Gaussian";
    case SeedProfile::Bubble: return "Bubble";
    case SeedProfile::Custom: return "Custom";
    }
    return "?";
}

SeedProfile parse_seed_profile(const std::string& s) {
    if (s == "Gaussian" || s == "gaussian") return SeedProfile::Gaussian;
    if (s == "Bubble" || s == "bubble") return SeedProfile::Bubble;
    if (s == "Custom" || s == "custom") return SeedProfile::Custom;
    throw Error(ErrorCode::BadInput, "unknown seed profile " + s);
}

Branch parse_branch(const std::string& s) {
    if (s == "Plus" || s == "plus" || s == "+") return Branch::Plus;
    if (s == "Minus" || s == "minus" || s == "-") return Branch::Minus;
    throw Error(ErrorCode::BadInput, "unknown branch " + s);
}

void validate(const SolverConfig& cfg) {
    if (cfg.max_iters < 1) throw Error(ErrorCode::BadInput, "max_iters must be >= 1");
    if (!(cfg.step0 > 0) || !(cfg.tol_P > 0) || !(cfg.tol_EL > 0) || !(cfg.tol_m > 0))
        throw Error(ErrorCode::BadInput, "step and tolerances must be positive");
    if (cfg.branch == Branch::Degenerate) throw Error(ErrorCode::BadInput, "branch must be Plus or Minus");
    if (cfg.seed_profile == SeedProfile::Custom && !cfg.custom_seed)
        throw Error(ErrorCode::BadInput, "custom seed requested without a profile");
}

SolutionReport evaluate(const RadialFunction& u, const ProblemParams& p) {
    SolutionReport s;
    s.profile = u;
    s.coefficients = fiber_coefficients(u, p);
    s.energy = energy(s.coefficients, p);
    s.pohozaev = pohozaev(s.coefficients, p);
    s.mass_sq = mass_sq(u, p.a);
    auto l = lambda_identity(u, p);
    s.lambda = l.rayleigh;
    s.lambda_pohozaev = l.pohozaev;
    s.el_residual = el_residual(u, s.lambda, p);
    s.grad_norm = std::sqrt(s.coefficients.A_grad);
    return s;
}

RadialFunction seed_profile(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid) {
    switch (cfg.seed_profile) {
    case SeedProfile::Gaussian: return sample(grid, [](double r) { return std::exp(-r * r); });
    case SeedProfile::Bubble: return cutoff_bubble({cfg.seed_eps, cfg.seed_cutoff_R, derive_exponents(p)}, grid);
    case SeedProfile::Custom:
        if (!cfg.custom_seed) throw Error(ErrorCode::BadInput, "no custom seed");
        if (cfg.custom_seed->size() != static_cast<std::size_t>(grid->n))
            throw Error(ErrorCode::BadInput, "custom seed does not live on the solver grid");
        return RadialFunction(grid, cfg.custom_seed->values());
    }
    return {};
}

namespace {

void set_mass(RadialFunction& u, const ProblemParams& p) {
    double m = mass_sq(u, p.a);
    if (!(m > 0.0)) throw Error(ErrorCode::ZeroProfile, "cannot rescale u = 0 onto the mass sphere");
    double c = p.rho / std::sqrt(m);
    for (auto& x : u.values()) x *= c;
}

bool tolerances_met(const SolutionReport& s, const ProblemParams& p, const SolverConfig& cfg) {
    return std::abs(s.pohozaev) <= cfg.tol_P * s.coefficients.A_grad && s.el_residual <= cfg.tol_EL &&
           std::abs(s.mass_sq - p.rho * p.rho) <= cfg.tol_m * p.rho * p.rho;
}

// natural-constraint descent: Sobolev-preconditioned gradient, tangent to the mass sphere,
// each trial pulled back to the fiber critical point of the requested branch
SolutionReport descend(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid, Branch branch,
                       std::optional<double> kappa) {
    validate(p);
    validate(cfg);
    const auto& g = *grid;
    const int n = g.n;

    SpMat L = 2.0 * detail::stiffness(g, p.a);
    auto wm = quadrature_weights(g, g.N - 2.0 * p.a);
    for (int i = 0; i < n; ++i) L.coeffRef(i, i) += 2.0 * wm[i];
    Eigen::SimplicialLDLT<SpMat> solver(L);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateProfile, "preconditioner factorisation failed");

    RadialFunction u = seed_profile(p, cfg, grid);
    for (auto& x : u.values()) x = std::abs(x);
    set_mass(u, p);
    u = project_to_manifold(u, p, branch);

    SolutionReport rep = evaluate(u, p);
    rep.energy_history.push_back(rep.energy);
    double tau = cfg.step0;
    int left_ball = 0;
    int it = 0;
    bool converged = false;
    for (; it < cfg.max_iters; ++it) {
        if (tolerances_met(rep, p, cfg)) {
            converged = true;
            break;
        }
        Vec grad = detail::to_eigen(energy_gradient(u, p));
        Vec uv = detail::to_eigen(u.values());
        Vec mu(n);
        for (int i = 0; i < n; ++i) mu[i] = 2.0 * wm[i] * uv[i];
        Vec G = solver.solve(grad);
        Vec Z = solver.solve(mu);
        Vec Gt = G - (mu.dot(G) / mu.dot(Z)) * Z;
        const double slope = grad.dot(Gt);
        const double e0 = rep.energy;

        bool accepted = false;
        RadialFunction trial;
        while (tau >= 1e-14) {
            std::vector<double> w(n);
            for (int i = 0; i < n; ++i) w[i] = std::abs(uv[i] - tau * Gt[i]);
            trial = RadialFunction(grid, std::move(w));
            try {
                set_mass(trial, p);
                trial = project_to_manifold(trial, p, branch);
            } catch (const Error&) {
                tau *= 0.5;
                continue;
            }
            if (kappa && std::sqrt(dirichlet_energy(trial, p.a)) >= *kappa) {
                ++left_ball;
                tau *= 0.5;
                continue;
            }
            if (energy(trial, p) <= e0 - 1e-4 * tau * slope) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;
        u = trial;
        rep = evaluate(u, p);
        rep.energy_history.push_back(rep.energy);
        tau = std::min(2.0 * tau, 10.0);
    }
    if (!converged && tolerances_met(rep, p, cfg)) converged = true;
    rep.iterations = it;
    rep.converged = converged;
    rep.left_ball_events = left_ball;
    {
        Exponents ex = derive_exponents(p);
        double tail = std::abs(u[n - 1]) * std::pow(g.r.back(), (p.N - 2.0 * ex.d) / 2.0);
        if (tail >= 1e-10) {
            std::ostringstream os;
            os << "window-extension: |u(r_max)| r_max^{(N-2d)/2} = " << tail << ", widen s_max";
            rep.warnings.push_back(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os.precision(6);
        os << "stopped after " << it << " iterations: |P|/A = " << std::abs(rep.pohozaev) / rep.coefficients.A_grad
           << ", EL residual = " << rep.el_residual << ", energy = " << rep.energy;
        throw SolverError(ErrorCode::NoConvergence, os.str(), rep);
    }
    return rep;
}

} // namespace

SolutionReport minimize_plus(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid,
                             std::optional<double> kappa_tilde) {
    if (derive_exponents(p).regime != Regime::Subcritical)
        throw Error(ErrorCode::RegimeMismatch, "the M+ minimiser exists only for q < q_c");
    return descend(p, cfg, grid, Branch::Plus, kappa_tilde);
}

LevelReport level_report(const SolutionReport& s, const ProblemParams& p, std::optional<double> S_ab,
                         std::optional<double> m_plus) {
    Exponents ex = derive_exponents(p);
    LevelReport lr;
    lr.level_value = s.energy;
    lr.bound_check.push_back({"0 < level", 0.0, s.energy, s.energy > 0.0});
    if (S_ab) {
        double dNS = ex.d / p.N * std::pow(*S_ab, p.N / (2.0 * ex.d));
        lr.diagnostics.push_back({"dN_S", dNS});
        if (ex.regime != Regime::Subcritical || p.beta == 0.0) {
            lr.bound_check.push_back({"level < (d/N) S^{N/2d}", s.energy, dNS, s.energy < dNS});
            lr.diagnostics.push_back({"upper_margin", dNS - s.energy});
        }
        if (m_plus && ex.regime == Regime::Subcritical) {
            double rhs = *m_plus + dNS;
            lr.bound_check.push_back({"level < m + (d/N) S^{N/2d}", s.energy, rhs, s.energy < rhs});
            lr.diagnostics.push_back({"m_plus", *m_plus});
            lr.diagnostics.push_back({"gap_margin", rhs - s.energy});
        }
    }
    lr.diagnostics.push_back({"lower_margin", s.energy});
    return lr;
}

MinusResult minimize_minus(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid,
                           std::optional<double> S_ab, std::optional<double> m_plus) {
    MinusResult res;
    res.solution = descend(p, cfg, grid, Branch::Minus, std::nullopt);
    FiberReport fr = analyze_fiber(res.solution.coefficients, p);
    if (fr.structure_label == "violated")
        throw SolverError(ErrorCode::StructureViolation, "fiber of the converged profile contradicts the regime",
                          res.solution, fr);
    res.level = level_report(res.solution, p, S_ab, m_plus);
    return res;
}

GapMember gap_rescale(const RadialFunction& u_hat, const ProblemParams& p) {
    double m = mass_sq(u_hat, p.a);
    if (!(m > 0.0)) throw Error(ErrorCode::ZeroProfile, "rescale of u = 0");
    GapMember gm;
    gm.tau = std::sqrt(m) / p.rho;
    gm.v = resample(u_hat, std::log(gm.tau));
    double amp = std::pow(gm.tau, (p.N - 2.0 * p.a - 2.0) / 2.0);
    for (auto& x : gm.v.values()) x *= amp;
    double mv = mass_sq(gm.v, p.a);
    gm.mass_discrepancy = std::abs(mv - p.rho * p.rho) / (p.rho * p.rho);
    set_mass(gm.v, p);
    return gm;
}

LevelReport energy_gap_check(const ProblemParams& p, const SolutionReport& ground, double eps, double S_ab,
                             double t_max, int n_t, double cutoff_R) {
    if (n_t < 2 || !(t_max > 0.0)) throw Error(ErrorCode::BadInput, "t grid needs t_max > 0 and two points");
    Exponents ex = derive_exponents(p);
    const auto& grid = ground.profile.grid_ptr();
    const RadialFunction& ut = ground.profile;
    RadialFunction ue = cutoff_bubble({eps, cutoff_R, ex}, grid);

    const double m = energy(ut, p);
    const double dNS = ex.d / p.N * std::pow(S_ab, p.N / (2.0 * ex.d));
    const double thr = m + dNS;

    double sup = -INFINITY, t_sup = 0, tau_sup = 0, max_disc = 0, e_t0 = 0;
    const int n = grid->n;
    for (int k = 0; k < n_t; ++k) {
        double t = t_max * k / (n_t - 1);
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = ut[i] + t * ue[i];
        GapMember gm = gap_rescale(RadialFunction(grid, std::move(w)), p);
        double e = energy(gm.v, p);
        if (k == 0) e_t0 = e;
        max_disc = std::max(max_disc, gm.mass_discrepancy);
        if (e > sup) {
            sup = e;
            t_sup = t;
            tau_sup = gm.tau;
        }
    }
    LevelReport lr;
    lr.level_value = sup;
    lr.bound_check.push_back({"sup_t E(v_eps_t) < m + (d/N) S^{N/2d}", sup, thr, sup < thr});
    lr.diagnostics = {{"eps", eps},         {"m", m},           {"dN_S", dNS},
                      {"margin", thr - sup}, {"t_at_sup", t_sup}, {"tau_at_sup", tau_sup},
                      {"energy_t0", e_t0},  {"max_mass_discrepancy", max_disc}};
    return lr;
}

const char* sweep_task_name(SweepTask t) { return t == SweepTask::MinimizePlus ? "minimize_plus" : "minimize_minus"; }

SweepTask parse_sweep_task(const std::string& s) {
    if (s == "minimize_plus" || s == "plus") return SweepTask::MinimizePlus;
    if (s == "minimize_minus" || s == "minus") return SweepTask::MinimizeMinus;
    throw Error(ErrorCode::BadInput, "unknown sweep task " + s);
}

ProblemParams with_param(const ProblemParams& p, const std::string& name, double value) {
    ProblemParams o = p;
    if (name == "N") {
        if (value != std::floor(value)) throw Error(ErrorCode::DimensionTooSmall, "N must be an integer");
        o.N = static_cast<int>(value);
    } else if (name == "a")
        o.a = value;
    else if (name == "b")
        o.b = value;
    else if (name == "q")
        o.q = value;
    else if (name == "beta")
        o.beta = value;
    else if (name == "rho")
        o.rho = value;
    else
        throw Error(ErrorCode::BadInput, "cannot vary " + name);
    return o;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

std::string sweep_row(const ProblemParams& base, const std::string& vary, double value, SweepTask task,
                      const SolverConfig& cfg, const SweepGrid& sg) {
    std::string regime, error;
    std::optional<SolutionReport> rep;
    try {
        ProblemParams p = with_param(base, vary, value);
        validate(p);
        regime = regime_name(derive_exponents(p).regime);
        auto grid = make_grid(sg.s_min, sg.s_max, sg.n, p.N);
        SolverConfig c = cfg;
        if (task == SweepTask::MinimizePlus)
            rep = minimize_plus(p, c, grid);
        else
            rep = minimize_minus(p, c, grid).solution;
    } catch (const SolverError& e) {
        rep = e.partial();
        error = e.name();
    } catch (const Error& e) {
        error = e.name();
    }
    std::ostringstream os;
    os << num(value) << ',' << sweep_task_name(task) << ',';
    if (rep) {
        os << (rep->converged ? "true" : "false") << ',' << num(rep->energy) << ',' << num(rep->lambda) << ','
           << num(rep->pohozaev) << ',' << num(rep->el_residual) << ',' << num(rep->mass_sq) << ','
           << rep->iterations;
    } else {
        os << "false,,,,,,";
    }
    os << ',' << error << ',' << regime << '\n';
    return os.str();
}

} // namespace

std::string sweep(const ProblemParams& base, const std::string& vary, const std::vector<double>& values, SweepTask task,
                  const SolverConfig& cfg, const SweepGrid& grid, unsigned threads) {
    static const std::set<std::string> known{"N", "a", "b", "q", "beta", "rho"};
    if (!known.count(vary)) throw Error(ErrorCode::BadInput, "cannot vary " + vary);
    validate(cfg);
    std::vector<std::string> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < values.size();)
            rows[i] = sweep_row(base, vary, values[i], task, cfg, grid);
    };
    unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < nt; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string out = "param_value,task,converged,energy,lambda,pohozaev,el_residual,mass_sq,iterations,error,regime\n";
    for (auto& r : rows) out += r;
    return out;
}

} // namespace ckn
