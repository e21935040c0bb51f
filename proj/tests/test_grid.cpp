#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/error.h"
#include "ckn/grid.h"
#include "oracles.h"

#include <cmath>
#include <filesystem>

using namespace ckn;

namespace {

ErrorCode grid_code(double s0, double s1, int n) {
    try {
        make_grid(s0, s1, n, 3);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::BadInput;
}

double gauss(double r) { return std::exp(-r * r); }

} // namespace

TEST_CASE("grid construction") {
    GridPtr g = make_grid(-13.8, 6.9, 2048, 3);
    CHECK(g->r.front() == doctest::Approx(std::exp(-13.8)));
    CHECK(g->r.back() == doctest::Approx(std::exp(6.9)));
    CHECK(g->ds == doctest::Approx(20.7 / 2047));
    for (int i = 1; i < g->n; ++i) REQUIRE(g->r[i] > g->r[i - 1]);
    CHECK(g->omega == doctest::Approx(4 * M_PI).epsilon(1e-15));
    CHECK(surface_area(4) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-15));

    GridPtr h = make_grid(0.0, 1.0, 129, 3), h2 = make_grid(0.0, 1.0, 257, 3);
    CHECK(h2->ds == doctest::Approx(h->ds / 2).epsilon(1e-15));

    CHECK(grid_code(0, 1, 1) == ErrorCode::BadGridSpec);
    CHECK(grid_code(0, 1, 63) == ErrorCode::BadGridSpec);
    CHECK(grid_code(1, 0, 128) == ErrorCode::BadGridSpec);
    CHECK(grid_code(0, NAN, 128) == ErrorCode::BadGridSpec);
}

TEST_CASE("default grid") {
    GridPtr g = default_grid(3);
    CHECK(g->n == 2048);
    CHECK(g->r.front() == doctest::Approx(1e-6));
    CHECK(g->r.back() == doctest::Approx(1e3));
}

TEST_CASE("Gaussian weighted norm against the Gamma closed form") {
    RadialFunction u = sample(default_grid(3), gauss);
    double expect = oracle::gauss_moment(3, 1.5, 2.0);
    CHECK(expect == doctest::Approx(2.3946).epsilon(1e-4));
    CHECK(weighted_norm(u, 2, 0.25) * weighted_norm(u, 2, 0.25) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(weighted_norm(u, 2, 0.25) == doctest::Approx(1.5475).epsilon(1e-4));
    // q = 4, w = 0.5: r^{N-1-2} e^{-4 r^2}
    CHECK(weighted_integral(u, 4, 0.5) == doctest::Approx(oracle::gauss_moment(3, 0.0, 4.0)).epsilon(1e-10));

    RadialFunction z = sample(default_grid(3), [](double) { return 0.0; });
    CHECK(weighted_norm(z, 2, 0.25) == 0.0);
    CHECK(z.is_zero());

    RadialFunction v = sample(default_grid(3), [](double r) { return -3.0 * gauss(r); });
    CHECK(weighted_norm(v, 2.5, 0.5) == doctest::Approx(3.0 * weighted_norm(u, 2.5, 0.5)).epsilon(1e-13));
}

TEST_CASE("non-integrable weight") {
    RadialFunction u = sample(default_grid(3), gauss);
    CHECK_NOTHROW(weighted_norm(u, 2, 1.0));
    CHECK_THROWS_AS(weighted_norm(u, 2, 2.0), Error);
    try {
        weighted_norm(u, 2, 1.5);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonIntegrable);
    }
}

TEST_CASE("Dirichlet energy") {
    RadialFunction u = sample(default_grid(3), gauss);
    double expect = 4.0 * oracle::gauss_moment(3, 3.5, 2.0);
    CHECK(expect == doctest::Approx(16 * M_PI * std::tgamma(2.25) / (2 * std::pow(2.0, 2.25))).epsilon(1e-14));
    CHECK(dirichlet_energy(u, 0.25) == doctest::Approx(expect).epsilon(1e-8));
    RadialFunction c = sample(default_grid(3), [](double) { return 2.0; });
    CHECK(dirichlet_energy(c, 0.25) == 0.0);

    double e2 = dirichlet_energy(sample(make_grid(std::log(1e-6), std::log(1e3), 2048, 3), gauss), 0.25);
    double e4 = dirichlet_energy(sample(make_grid(std::log(1e-6), std::log(1e3), 4096, 3), gauss), 0.25);
    CHECK(std::abs(e2 - e4) / e4 < 1e-6);
}

TEST_CASE("trapezoid convergence order") {
    // reference on the same window, so only the discretisation error is compared
    auto f = [](double r) { return std::exp(-r * r) * (1 + r * r); };
    double s0 = std::log(1e-6), s1 = std::log(1e3);
    double ref = weighted_integral(sample(make_grid(s0, s1, 16384, 3), f), 2, 0.25);
    double err_prev = 0;
    for (int n : {64, 128, 256}) {
        double err = std::abs(weighted_integral(sample(make_grid(s0, s1, n, 3), f), 2, 0.25) - ref);
        if (err_prev > 0 && err > 1e-13 * ref) CHECK(err_prev / err >= 4.0);
        err_prev = err;
    }
}

TEST_CASE("resample") {
    GridPtr g = default_grid(3);
    RadialFunction u = sample(g, gauss);
    RadialFunction same = resample(u, 0.0);
    CHECK(same.values() == u.values());

    RadialFunction one = resample(u, g->ds);
    for (int i = 0; i + 1 < g->n; ++i) REQUIRE(one[i] == u[i + 1]);
    CHECK(one[g->n - 1] == 0.0);

    RadialFunction s = resample(u, 0.3);
    double err = 0;
    for (int i = 0; i < g->n; ++i) err = std::max(err, std::abs(s[i] - gauss(std::exp(0.3) * g->r[i])));
    CHECK(err < 1e-8);

    double half = (g->s_max - g->s_min) / 2;
    CHECK_THROWS_AS(resample(u, half + 0.1), Error);
    CHECK_THROWS_AS(resample(u, -half - 0.1), Error);
}

TEST_CASE("CSV round trip") {
    GridPtr g = make_grid(-5, 3, 128, 3);
    RadialFunction u = sample(g, gauss);
    CHECK(to_csv(u).rfind("r,u\n", 0) == 0);
    auto path = std::filesystem::temp_directory_path() / "ckn_grid_roundtrip.csv";
    write_csv(u, path.string());
    RadialFunction v = read_csv(path.string(), 3);
    std::filesystem::remove(path);
    REQUIRE(v.size() == u.size());
    CHECK(v.grid().s_min == doctest::Approx(-5.0).epsilon(1e-14));
    for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(v[i] == u[i]);
}

TEST_CASE("mismatched function length") {
    CHECK_THROWS_AS(RadialFunction(default_grid(3), std::vector<double>(10, 1.0)), Error);
}
