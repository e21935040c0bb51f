#pragma once

#include "ckn/error.h"
#include "ckn/fiber.h"
#include "ckn/functionals.h"
#include "ckn/grid.h"
#include "ckn/params.h"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ckn {

enum class SeedProfile { Gaussian, Bubble, Custom };
const char* seed_profile_name(SeedProfile s);
SeedProfile parse_seed_profile(const std::string& s);
Branch parse_branch(const std::string& s);

struct SolverConfig {
    int max_iters = 2000;
    double step0 = 1e-1;
    double tol_P = 1e-8;   // relative to A_grad
    double tol_EL = 1e-5;
    double tol_m = 1e-10;  // relative to rho^2
    SeedProfile seed_profile = SeedProfile::Gaussian;
    Branch branch = Branch::Plus;
    double seed_eps = 1e-2;
    double seed_cutoff_R = 1.0;
    std::optional<RadialFunction> custom_seed;
};

void validate(const SolverConfig& cfg);

struct BoundCheck {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    bool holds = false;
};

struct LevelReport {
    double level_value = 0;
    std::vector<BoundCheck> bound_check;
    std::vector<std::pair<std::string, double>> diagnostics;
};

// NoConvergence / StructureViolation with the last iterate attached
class SolverError : public Error {
public:
    SolverError(ErrorCode code, const std::string& msg, SolutionReport partial,
                std::optional<FiberReport> fiber = std::nullopt)
        : Error(code, msg), partial_(std::move(partial)), fiber_(std::move(fiber)) {}
    const SolutionReport& partial() const { return partial_; }
    const std::optional<FiberReport>& fiber() const { return fiber_; }

private:
    SolutionReport partial_;
    std::optional<FiberReport> fiber_;
};

// every field of the report evaluated at u
SolutionReport evaluate(const RadialFunction& u, const ProblemParams& p);

RadialFunction seed_profile(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid);

// kappa_tilde: steps leaving the ball || |x|^{-a} grad u ||_2 < kappa_tilde are rejected
SolutionReport minimize_plus(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid,
                             std::optional<double> kappa_tilde = std::nullopt);

struct MinusResult {
    SolutionReport solution;
    LevelReport level;
};

// S_ab enables the (d/N) S^{N/2d} bracket, m_plus the subcritical gap bracket
MinusResult minimize_minus(const ProblemParams& p, const SolverConfig& cfg, const GridPtr& grid,
                           std::optional<double> S_ab = std::nullopt, std::optional<double> m_plus = std::nullopt);
LevelReport level_report(const SolutionReport& s, const ProblemParams& p, std::optional<double> S_ab,
                         std::optional<double> m_plus);

// tau^{(N-2a-2)/2} u(tau r), tau = || |x|^{-a} u ||_2 / rho
struct GapMember {
    RadialFunction v;
    double tau = 0;
    double mass_discrepancy = 0; // relative, before the explicit renormalisation
};
GapMember gap_rescale(const RadialFunction& u_hat, const ProblemParams& p);

// sup over t of E(v_{eps,t}), v built from ground + t u_eps; t on [0, t_max] with n_t points
LevelReport energy_gap_check(const ProblemParams& p, const SolutionReport& ground, double eps, double S_ab,
                             double t_max = 10.0, int n_t = 401, double cutoff_R = 1.0);

enum class SweepTask { MinimizePlus, MinimizeMinus };
const char* sweep_task_name(SweepTask t);
SweepTask parse_sweep_task(const std::string& s);

struct SweepGrid {
    double s_min = 0;
    double s_max = 0;
    int n = 0;
};

// one row per value, errors captured per row
std::string sweep(const ProblemParams& base, const std::string& vary, const std::vector<double>& values, SweepTask task,
                  const SolverConfig& cfg, const SweepGrid& grid, unsigned threads);

ProblemParams with_param(const ProblemParams& p, const std::string& name, double value);

} // namespace ckn
