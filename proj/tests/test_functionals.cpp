#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/error.h"
#include "ckn/extremals.h"
#include "ckn/functionals.h"
#include "ckn/params.h"
#include "oracles.h"

#include <cmath>
#include <random>

using namespace ckn;

namespace {

ProblemParams p0(double beta = 0.7) { return validate(3, 0.25, 0.5, 2.5, beta, 1.0); }

RadialFunction gaussian() {
    return sample(default_grid(3), [](double r) { return std::exp(-r * r); });
}

double rel(double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

} // namespace

TEST_CASE("zero profile") {
    RadialFunction z = sample(default_grid(3), [](double) { return 0.0; });
    ProblemParams p = p0();
    CHECK(mass_sq(z, p.a) == 0.0);
    CHECK(energy(z, p) == 0.0);
    FiberCoefficients c = fiber_coefficients(z, p);
    CHECK(c.A_grad == 0.0);
    CHECK(c.B_q == 0.0);
    CHECK(c.C_crit == 0.0);
    CHECK(el_residual(z, -1.0, p) == 0.0);
    CHECK_THROWS_AS(lambda_identity(z, p), Error);
}

TEST_CASE("mass of the Gaussian") {
    CHECK(mass_sq(gaussian(), 0.25) == doctest::Approx(oracle::gauss_moment(3, 1.5, 2.0)).epsilon(1e-10));
}

TEST_CASE("dilation: mass invariance and scaling laws on the profile family") {
    ProblemParams p = p0();
    Exponents ex = derive_exponents(p);
    GridPtr g = default_grid(3);
    for (const auto& prof : oracle::family20()) {
        CAPTURE(prof.name);
        RadialFunction u = sample(g, prof.f);
        FiberCoefficients c0 = fiber_coefficients(u, p);
        double m0 = mass_sq(u, p.a);
        for (double t : {-2.0, -1.0, 1.0, 2.0}) {
            CAPTURE(t);
            RadialFunction v = dilate(u, t, p);
            FiberCoefficients c = fiber_coefficients(v, p);
            CHECK(rel(mass_sq(v, p.a), m0) < 1e-8);
            CHECK(rel(c.A_grad, std::exp(2 * t) * c0.A_grad) < 1e-6);
            CHECK(rel(c.B_q, std::exp(p.q * ex.delta_q * t) * c0.B_q) < 1e-6);
            CHECK(rel(c.C_crit, std::exp(ex.two_sharp * t) * c0.C_crit) < 1e-6);
            double phi = std::exp(2 * t) / 2 * c0.A_grad - p.beta * std::exp(p.q * ex.delta_q * t) / p.q * c0.B_q -
                         std::exp(ex.two_sharp * t) / ex.two_sharp * c0.C_crit;
            CHECK(rel(energy(v, p), phi) < 1e-6);
            double dphi = std::exp(2 * t) * c0.A_grad - p.beta * ex.delta_q * std::exp(p.q * ex.delta_q * t) * c0.B_q -
                          std::exp(ex.two_sharp * t) * c0.C_crit;
            CHECK(std::abs(pohozaev(v, p) - dphi) < 1e-6 * std::max(std::abs(dphi), c.A_grad));
        }
    }
    RadialFunction u = gaussian();
    CHECK(dilate(u, 0.0, p).values() == u.values());
    CHECK_THROWS_AS(dilate(u, 50.0, p), Error);
}

TEST_CASE("energy and pohozaev closed forms") {
    RadialFunction u = gaussian();
    ProblemParams p = p0(0.7), p2 = p0(1.9);
    FiberCoefficients c = fiber_coefficients(u, p);
    Exponents ex = derive_exponents(p);
    CHECK(energy(u, p) == doctest::Approx(c.A_grad / 2 - 0.7 / 2.5 * c.B_q - c.C_crit / 4).epsilon(1e-14));
    CHECK(pohozaev(u, p) == doctest::Approx(c.A_grad - 0.7 * ex.delta_q * c.B_q - c.C_crit).epsilon(1e-14));
    // beta enters linearly
    CHECK(energy(u, p) - (1.9 - 0.7) / p.q * c.B_q == doctest::Approx(energy(u, p2)).epsilon(1e-13));
    CHECK(energy(u, p2) < energy(u, p));
    CHECK(pohozaev(u, p2) < pohozaev(u, p));
    CHECK(pohozaev(u, p0(1e6)) < 0);

    FiberCoefficients bal{2.0, 5.0, 2.0};
    CHECK(pohozaev(bal, p0(0.0)) == 0.0);
}

TEST_CASE("bubble solves the critical equation up to a constant") {
    ProblemParams p = p0(0.0);
    BubbleSpec spec;
    spec.exponents = derive_exponents(p);
    RadialFunction u = bubble(spec, constants_grid(p));
    CriticalFit fit = fit_critical_coefficient(u, p);
    MESSAGE("fitted c = " << fit.c << ", residual " << fit.residual);
    CHECK(fit.residual < 1e-3);
    CHECK(fit.c > 0);

    FiberCoefficients c = fiber_coefficients(u, p);
    auto bi = oracle::bubble(3, 0.25, 0.5);
    CHECK(rel(c.A_grad, bi.A) < 1e-6);
    CHECK(rel(c.C_crit, bi.C) < 1e-6);
    CHECK(rel(c.A_grad / std::pow(c.C_crit, 0.5), std::sqrt(M_PI / 3)) < 1e-6);
}

TEST_CASE("lambda identity") {
    RadialFunction u = gaussian();
    ProblemParams p = p0(0.0);
    CHECK(lambda_identity(u, p).pohozaev == 0.0);
    ProblemParams q = p0(0.5);
    double m = mass_sq(u, q.a);
    q.rho = std::sqrt(m);
    LambdaPair l = lambda_identity(u, q);
    CHECK(l.pohozaev < 0);
    FiberCoefficients c = fiber_coefficients(u, q);
    CHECK(l.rayleigh == doctest::Approx((c.A_grad - 0.5 * c.B_q - c.C_crit) / m).epsilon(1e-13));
}

TEST_CASE("energy gradient matches finite differences") {
    ProblemParams p = p0(0.8);
    GridPtr g = default_grid(3);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (const auto& prof : {oracle::family20()[1], oracle::family20()[5], oracle::family20()[13]}) {
        CAPTURE(prof.name);
        RadialFunction u = sample(g, prof.f);
        std::vector<double> grad = energy_gradient(u, p);
        for (int k = 0; k < 3; ++k) {
            // smooth random direction localized away from the window ends
            double c1 = nd(rng), c2 = nd(rng), w = 0.5 + std::abs(nd(rng));
            RadialFunction h = sample(g, [&](double r) { return (c1 + c2 * r) * std::exp(-w * r * r); });
            double dir = 0;
            for (int i = 0; i < g->n; ++i) dir += grad[i] * h[i];
            double eps = 1e-5;
            RadialFunction up = u, um = u;
            for (int i = 0; i < g->n; ++i) {
                up[i] += eps * h[i];
                um[i] -= eps * h[i];
            }
            double fd = (energy(up, p) - energy(um, p)) / (2 * eps);
            CHECK(std::abs(fd - dir) <= 1e-4 * std::abs(fd));
        }
    }
}

TEST_CASE("signed power") {
    CHECK(signed_pow(-2.0, 3.0) == doctest::Approx(-4.0));
    CHECK(signed_pow(2.0, 2.5) == doctest::Approx(std::pow(2.0, 1.5)));
    CHECK(signed_pow(0.0, 2.5) == 0.0);
}
