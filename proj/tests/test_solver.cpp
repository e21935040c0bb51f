#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/error.h"
#include "ckn/extremals.h"
#include "ckn/fiber.h"
#include "ckn/functionals.h"
#include "ckn/params.h"
#include "ckn/solver.h"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace ckn;

namespace {

// envelope threshold at the reference point, frozen from the constants run
constexpr double kBetaHalf = 1.272070178;
const double kS = std::sqrt(M_PI / 3.0);

ProblemParams p0(double beta, double q = 2.5) { return validate(3, 0.25, 0.5, q, beta, 1.0); }

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_CASE("config validation") {
    SolverConfig c;
    CHECK_NOTHROW(validate(c));
    c.max_iters = 0;
    CHECK_THROWS_AS(validate(c), Error);
    c = SolverConfig{};
    c.tol_EL = -1;
    CHECK_THROWS_AS(validate(c), Error);
    CHECK(parse_branch("Minus") == Branch::Minus);
    CHECK(parse_seed_profile("Bubble") == SeedProfile::Bubble);
    CHECK_THROWS_AS(parse_branch("sideways"), Error);
}

TEST_CASE("ground state on M+ at the reference point") {
    ProblemParams p = p0(kBetaHalf * 0.999);
    SolverConfig cfg;
    SolutionReport s = minimize_plus(p, cfg, default_grid(3));
    CHECK(s.converged);
    CHECK(s.energy < 0);
    CHECK(s.lambda < 0);
    CHECK(std::abs(s.pohozaev) <= 1e-8 * s.coefficients.A_grad);
    CHECK(s.el_residual <= 1e-4);
    CHECK(std::abs(s.mass_sq - 1.0) <= 1e-10);
    CHECK(std::abs(s.lambda - s.lambda_pohozaev) <= 1e-3 * std::abs(s.lambda_pohozaev));
    for (std::size_t i = 1; i < s.energy_history.size(); ++i)
        CHECK(s.energy_history[i] <= s.energy_history[i - 1] + 1e-15);
    // the last dilation interpolates, so allow spline ringing far down the tail
    double top = *std::max_element(s.profile.values().begin(), s.profile.values().end());
    double low = *std::min_element(s.profile.values().begin(), s.profile.values().end());
    CHECK(low >= -1e-12 * top);
    FiberReport f = analyze_fiber(s.profile, p);
    REQUIRE(!f.criticals.empty());
    CHECK(f.criticals.front().branch == Branch::Plus);
    CHECK(std::abs(f.criticals.front().t) < 1e-6);
}

TEST_CASE("ground state outside the subcritical regime") {
    try {
        minimize_plus(p0(0.5, 3.0), SolverConfig{}, default_grid(3));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RegimeMismatch);
    }
}

TEST_CASE("non-convergence carries the last iterate") {
    SolverConfig cfg;
    cfg.max_iters = 3;
    try {
        minimize_plus(p0(1.0), cfg, default_grid(3));
        FAIL("expected an error");
    } catch (const SolverError& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
        CHECK(!e.partial().converged);
        CHECK(e.partial().iterations == 3);
        CHECK(e.partial().profile.size() == 2048);
    }
}

TEST_CASE("mountain-pass level in the supercritical regime") {
    ProblemParams p = p0(1.0, 3.0);
    SolverConfig cfg;
    cfg.branch = Branch::Minus;
    cfg.seed_profile = SeedProfile::Bubble;
    MinusResult r = minimize_minus(p, cfg, wide_grid(3), kS);
    CHECK(r.solution.converged);
    CHECK(r.solution.lambda < 0);
    CHECK(r.level.level_value > 0);
    CHECK(r.level.level_value < M_PI / 12);
    for (const auto& b : r.level.bound_check) {
        CAPTURE(b.name);
        CHECK(b.holds);
    }
    // frozen from the solver run
    CHECK(r.level.level_value == doctest::Approx(0.211102).epsilon(1e-4));
}

TEST_CASE("level report brackets") {
    SolutionReport s;
    s.energy = 0.1;
    LevelReport l = level_report(s, p0(1.0, 3.0), kS, std::nullopt);
    REQUIRE(l.bound_check.size() == 2);
    CHECK(l.bound_check[1].rhs == doctest::Approx(M_PI / 12).epsilon(1e-12));
    CHECK(l.bound_check[1].holds);
    s.energy = 0.3;
    CHECK(!level_report(s, p0(1.0, 3.0), kS, std::nullopt).bound_check[1].holds);
    s.energy = 0.2;
    LevelReport sub = level_report(s, p0(1.0), kS, -0.05);
    CHECK(sub.bound_check.back().rhs == doctest::Approx(-0.05 + M_PI / 12).epsilon(1e-12));
}

TEST_CASE("gap rescale lands exactly on the mass sphere") {
    ProblemParams p = p0(0.5);
    p.rho = 1.7;
    RadialFunction u = sample(wide_grid(3), [](double r) { return std::exp(-r * r) * (1 + r); });
    GapMember g = gap_rescale(u, p);
    CHECK(mass_sq(g.v, p.a) == doctest::Approx(p.rho * p.rho).epsilon(1e-13));
    CHECK(g.mass_discrepancy < 1e-8);
    CHECK(g.tau == doctest::Approx(std::sqrt(mass_sq(u, p.a)) / p.rho).epsilon(1e-13));
    // the gradient norm is invariant under this rescaling
    CHECK(std::abs(dirichlet_energy(g.v, p.a) / dirichlet_energy(u, p.a) - 1) < 1e-6);
}

TEST_CASE("sweep output") {
    SweepGrid g{std::log(1e-6), std::log(1e3), 2048};
    std::string header = "param_value,task,converged,energy,lambda,pohozaev,el_residual,mass_sq,iterations,error,regime";
    CHECK(sweep(p0(0.5), "beta", {}, SweepTask::MinimizePlus, SolverConfig{}, g, 2) == header + "\n");

    std::string out = sweep(p0(0.5), "q", {2.4, 3.0, 5.0}, SweepTask::MinimizePlus, SolverConfig{}, g, 3);
    auto ls = lines(out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == header);
    CHECK(ls[1].find(",minimize_plus,true,") != std::string::npos);
    CHECK(ls[2].find("RegimeMismatch") != std::string::npos);
    CHECK(ls[3].find("PowerOutOfRange") != std::string::npos);
    CHECK_THROWS_AS(sweep(p0(0.5), "zeta", {1.0}, SweepTask::MinimizePlus, SolverConfig{}, g, 1), Error);

    CHECK(with_param(p0(0.5), "rho", 2.0).rho == 2.0);
    CHECK(parse_sweep_task("minimize_minus") == SweepTask::MinimizeMinus);
}
