#include "ckn/extremals.h"
#include "ckn/detail/operators.h"
#include "ckn/error.h"
#include "ckn/functionals.h"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <locale>
#include <random>
#include <sstream>

namespace ckn {

using detail::SpMat;
using detail::Vec;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double mu_of(const Exponents& ex, int N) { return (N - 2.0 * ex.d) / (2.0 * ex.d); }

} // namespace

double smoothstep_cutoff(double r, double R) {
    if (r <= R) return 1.0;
    if (r >= 2.0 * R) return 0.0;
    double z = (r - R) / R;
    return 1.0 - 3.0 * z * z + 2.0 * z * z * z;
}

RadialFunction bubble(const BubbleSpec& spec, const GridPtr& grid) {
    if (!(spec.eps > 0.0)) throw Error(ErrorCode::BadInput, "eps must be positive");
    const auto& ex = spec.exponents;
    const int N = grid->N;
    const double mu = mu_of(ex, N);
    const double K = std::pow(2.0 * ex.two_sharp * ex.A_bubble * spec.eps, mu / 2.0);
    return sample(grid, [&](double r) { return K / std::pow(spec.eps + std::pow(r, ex.alpha_bubble), mu); });
}

RadialFunction cutoff_bubble(const BubbleSpec& spec, const GridPtr& grid) {
    if (!(spec.cutoff_R > 0.0)) throw Error(ErrorCode::BadInput, "R must be positive");
    if (2.0 * spec.cutoff_R >= grid->r.back() || spec.cutoff_R <= grid->r.front())
        throw Error(ErrorCode::CutoffOutsideWindow, "cutoff annulus [R, 2R] not inside the grid, R = " + fmt(spec.cutoff_R));
    RadialFunction u = bubble(spec, grid);
    for (int i = 0; i < grid->n; ++i) u[i] *= smoothstep_cutoff(grid->r[i], spec.cutoff_R);
    return u;
}

GridPtr constants_grid(const ProblemParams& p) {
    Exponents ex = derive_exponents(p);
    const int N = p.N;
    const double g2 = N - 2.0 - 2.0 * p.a;
    const double kl = std::min(g2 + 2.0 * ex.alpha_bubble, N - p.b * ex.two_sharp);
    const double shift = std::log(2.0) / ex.alpha_bubble;
    double s_max = 32.0 / g2 + 2.0 + shift;
    double s_min = -(32.0 / kl + 2.0 + shift);
    int n = static_cast<int>(std::ceil((s_max - s_min) / 0.0125)) + 1;
    n = std::min(n, 1 << 18);
    return make_grid(s_min, s_max, n, N);
}

namespace {

struct QuotientParts {
    double A, C;
};

QuotientParts bubble_parts(const ProblemParams& p, const GridPtr& grid, double eps) {
    Exponents ex = derive_exponents(p);
    BubbleSpec spec{eps, 1.0, ex};
    RadialFunction U = bubble(spec, grid);
    return {dirichlet_energy(U, p.a), weighted_integral(U, ex.two_sharp, p.b)};
}

double tail_error(const ProblemParams& p, const RadialGrid& g, double eps, const QuotientParts& q) {
    Exponents ex = derive_exponents(p);
    const int N = p.N;
    const double mu = mu_of(ex, N), al = ex.alpha_bubble, ts = ex.two_sharp;
    const double g2 = N - 2.0 - 2.0 * p.a;
    const double K = std::pow(2.0 * ts * ex.A_bubble * eps, mu / 2.0);
    const double U0 = K * std::pow(eps, -mu);
    const double w = g.omega;
    double A_right = w * g2 * K * K * std::exp(-g2 * g.s_max);
    double C_right = w * std::pow(K, ts) * std::exp(-N * g.s_max) / N;
    double kA = g2 + 2.0 * al, kC = N - p.b * ts;
    double A_left = w * U0 * U0 * mu * mu * al * al / (eps * eps) * std::exp(kA * g.s_min) / kA;
    double C_left = w * std::pow(U0, ts) * std::exp(kC * g.s_min) / kC;
    return (A_left + A_right) / q.A + (2.0 / ts) * (C_left + C_right) / q.C;
}

} // namespace

double bubble_tail_error(const ProblemParams& p, const RadialGrid& grid, double eps) {
    auto g = std::make_shared<RadialGrid>(grid);
    return tail_error(p, grid, eps, bubble_parts(p, g, eps));
}

double bubble_quotient(const ProblemParams& p, const GridPtr& grid, double eps) {
    auto q = bubble_parts(p, grid, eps);
    double err = tail_error(p, *grid, eps, q);
    if (err > 1e-7)
        throw Error(ErrorCode::QuadratureDivergence,
                    "bubble tails outside the window carry relative weight " + fmt(err) + "; widen the grid");
    return q.A / std::pow(q.C, 2.0 / two_sharp(p.N, p.a, p.b));
}

double best_constant_S(const ProblemParams& p, const GridPtr& grid) { return bubble_quotient(p, grid, 1.0); }

DescentResult rayleigh_descent_S(const ProblemParams& p, const GridPtr& grid, int max_iters) {
    const auto& g = *grid;
    const int n = g.n;
    const double ts = two_sharp(p.N, p.a, p.b);
    SpMat K = detail::stiffness(g, p.a);
    // u(r_max) = 0 pins the otherwise singular stiffness
    SpMat L = (2.0 * K).topLeftCorner(n - 1, n - 1);
    Eigen::SimplicialLDLT<SpMat> solver(L);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateProfile, "stiffness factorisation failed");
    auto wc = quadrature_weights(g, g.N - p.b * ts);

    auto parts = [&](const Vec& u) {
        Vec Ku = K * u;
        double A = u.dot(Ku), C = 0.0;
        for (int i = 0; i < n; ++i) C += wc[i] * std::pow(std::abs(u[i]), ts);
        return std::pair<double, double>(A, C);
    };
    auto normalise = [&](Vec& u) {
        u = u.cwiseAbs();
        u[n - 1] = 0.0;
        u /= std::pow(parts(u).second, 1.0 / ts);
    };

    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = std::exp(-g.r[i] * g.r[i]);
    normalise(u);
    auto [A, C] = parts(u);
    double R = A / std::pow(C, 2.0 / ts);

    DescentResult res;
    double tau = 1.0;
    int it = 0;
    for (; it < max_iters; ++it) {
        Vec grad = 2.0 * (K * u);
        for (int i = 0; i < n; ++i) grad[i] -= 2.0 * (A / C) * wc[i] * std::pow(std::abs(u[i]), ts - 1.0);
        grad /= std::pow(C, 2.0 / ts);
        Vec G = Vec::Zero(n);
        G.head(n - 1) = solver.solve(grad.head(n - 1));
        double slope = grad.dot(G);
        if (slope <= 1e-15 * R) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        Vec un;
        double An = 0, Cn = 0, Rn = 0;
        while (tau > 1e-14) {
            un = u - tau * G;
            normalise(un);
            std::tie(An, Cn) = parts(un);
            Rn = An / std::pow(Cn, 2.0 / ts);
            if (Rn <= R - 1e-4 * tau * slope) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) {
            res.converged = true;
            break;
        }
        bool stalled = R - Rn <= 1e-15 * R;
        u = un;
        A = An;
        C = Cn;
        R = Rn;
        tau = std::min(2.0 * tau, 1.0);
        if (stalled) {
            res.converged = true;
            break;
        }
    }
    res.S = R;
    res.iterations = it;
    res.profile = RadialFunction(grid, detail::from_eigen(u));
    return res;
}

double interpolation_ratio(const RadialFunction& u, const ProblemParams& p) {
    double dq = delta_q(p.N, p.a, p.b, p.q);
    double A = dirichlet_energy(u, p.a);
    double B = weighted_integral(u, p.q, p.b);
    double M = weighted_integral(u, 2.0, p.a);
    if (!(A > 0.0) || !(M > 0.0)) throw Error(ErrorCode::ZeroProfile, "ratio undefined for u = 0");
    return B / (std::pow(A, p.q * dq / 2.0) * std::pow(M, (1.0 - dq) * p.q / 2.0));
}

InterpConstant interp_constant_C(const ProblemParams& p, const GridPtr& grid, std::uint64_t seed) {
    Exponents ex = derive_exponents(p);
    const auto& g = *grid;
    const int n = g.n;

    struct Member {
        std::string name;
        RadialFunction u;
        double ratio;
    };
    std::vector<Member> family;
    auto add = [&](const std::string& name, RadialFunction u) {
        double r = interpolation_ratio(u, p);
        family.push_back({name, std::move(u), r});
    };
    std::vector<std::pair<std::string, std::function<double(double)>>> shapes = {
        {"gauss", [](double r) { return std::exp(-r * r); }},
        {"exp", [](double r) { return std::exp(-r); }},
        {"exp15", [](double r) { return std::exp(-std::pow(r, 1.5)); }},
        {"sech", [](double r) { return 1.0 / std::cosh(r); }},
        {"poly_exp", [](double r) { return (1.0 + r) * std::exp(-r); }},
        {"algebraic4", [](double r) { return std::pow(1.0 + r * r, -4.0); }},
    };
    for (auto& [name, f] : shapes) add(name, sample(grid, f));
    for (double R : {1.0, 4.0}) {
        if (2.0 * R < g.r.back()) add("cutoff_bubble_R" + fmt(R), cutoff_bubble({1.0, R, ex}, grid));
    }
    const std::size_t base = family.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 24; ++k) {
        std::size_t i = rng() % base, j = rng() % base;
        double theta = unit(rng), t = -2.0 + 4.0 * unit(rng);
        RadialFunction v = resample(family[j].u, t);
        std::vector<double> w(n);
        for (int m = 0; m < n; ++m) w[m] = theta * family[i].u[m] + (1.0 - theta) * v[m];
        add("mix_" + family[i].name + "_" + family[j].name, RadialFunction(grid, std::move(w)));
    }
    std::sort(family.begin(), family.end(), [](const Member& x, const Member& y) { return x.ratio > y.ratio; });

    InterpConstant out;
    out.family_lower_bound = family.front().ratio;
    out.family_best = family.front().name;

    // Petviashvili: u <- M^{(q-1)/(q-2)} L^{-1} N(u), L = 2K + 2W_M
    SpMat K = detail::stiffness(g, p.a);
    auto wm = quadrature_weights(g, g.N - 2.0 * p.a);
    auto wb = quadrature_weights(g, g.N - p.b * p.q);
    SpMat L = 2.0 * K;
    for (int i = 0; i < n; ++i) L.coeffRef(i, i) += 2.0 * wm[i];
    Eigen::SimplicialLDLT<SpMat> solver(L);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::DegenerateProfile, "factorisation failed");
    const double gam = (p.q - 1.0) / (p.q - 2.0);

    double best = out.family_lower_bound;
    RadialFunction best_u = family.front().u;
    int total_its = 0;
    bool any_converged = false;
    for (std::size_t s = 0; s < std::min<std::size_t>(3, family.size()); ++s) {
        Vec u = detail::to_eigen(family[s].u.values()).cwiseAbs();
        bool conv = false;
        int it = 0;
        for (; it < 500; ++it) {
            Vec Nu(n);
            for (int i = 0; i < n; ++i) Nu[i] = p.q * wb[i] * std::pow(std::abs(u[i]), p.q - 1.0);
            double M = u.dot(L * u) / u.dot(Nu);
            Vec un = std::pow(M, gam) * solver.solve(Nu);
            for (int i = 0; i < n; ++i) un[i] = std::max(un[i], 0.0);
            double diff = (un - u).cwiseAbs().maxCoeff(), scale = un.cwiseAbs().maxCoeff();
            u = un;
            if (diff <= 1e-13 * scale) {
                conv = true;
                break;
            }
        }
        total_its += it;
        any_converged = any_converged || conv;
        RadialFunction cand(grid, detail::from_eigen(u));
        double r = interpolation_ratio(cand, p);
        if (r > best) {
            best = r;
            best_u = cand;
        }
    }
    out.Cq = best;
    out.C = std::pow(best, 1.0 / p.q);
    out.iterations = total_its;
    out.converged = any_converged;
    out.optimizer = best_u;
    return out;
}

const char* quantity_name(Quantity q) {
    switch (q) {
    case Quantity::GradSq: return "GradSq";
    case Quantity::CritNorm: return "CritNorm";
    case Quantity::QNorm: return "QNorm";
    case Quantity::MassSq: return "MassSq";
    case Quantity::CrossCrit: return "CrossCrit";
    case Quantity::CrossMass: return "CrossMass";
    case Quantity::RatioQc: return "RatioQc";
    }
    return "?";
}

Quantity parse_quantity(const std::string& s) {
    for (Quantity q : {Quantity::GradSq, Quantity::CritNorm, Quantity::QNorm, Quantity::MassSq, Quantity::CrossCrit,
                       Quantity::CrossMass, Quantity::RatioQc})
        if (s == quantity_name(q)) return q;
    throw Error(ErrorCode::BadInput, "unknown quantity " + s);
}

AsymptoticsPrediction predict_asymptotics(Quantity quantity, const ProblemParams& p, bool boundary_branch) {
    Exponents ex = derive_exponents(p);
    const int N = p.N;
    const double a = p.a, b = p.b, d = ex.d;
    const double n2d = N - 2.0 * d, g2 = N - 2.0 - 2.0 * a, nab = N - 2.0 * a + 2.0 * b;
    const double tol = 1e-12;

    AsymptoticsPrediction pr;
    pr.quantity = quantity;

    auto boundary_guard = [&](double disc, const char* what) {
        if (std::abs(disc) <= tol && !boundary_branch)
            throw Error(ErrorCode::BranchBoundary, std::string(what) + " sits on a case boundary; request it explicitly");
    };
    // three-way split on a against max{0,(N-4)/2}; the equality case needs N > 4
    auto a_case = [&]() {
        double am = std::max(0.0, (N - 4) / 2.0);
        if (N > 4 && std::abs(a - (N - 4) / 2.0) <= tol) {
            boundary_guard(0.0, "a = (N-4)/2");
            return 0;
        }
        return a < am ? -1 : 1;
    };

    switch (quantity) {
    case Quantity::GradSq:
        pr.exponent = n2d / (2.0 * d);
        pr.case_label = "correction";
        break;
    case Quantity::CritNorm:
        pr.exponent = N / (2.0 * d);
        pr.case_label = "correction";
        break;
    case Quantity::CrossCrit:
    case Quantity::CrossMass:
        pr.exponent = n2d / (4.0 * d);
        pr.case_label = "single";
        break;
    case Quantity::QNorm: {
        double qt = tail_threshold_q(N, a, b);
        double disc = (p.q - qt) / qt;
        boundary_guard(disc, "q = N/(N-2(1+a)+b)");
        double upper = (2.0 * N - N * p.q + 2.0 * p.q * d) * n2d / (4.0 * d * g2);
        if (std::abs(disc) <= tol) {
            pr.exponent = upper;
            pr.log_power = 1.0;
            pr.case_label = "q_at_threshold";
        } else if (disc < 0) {
            pr.exponent = n2d / (4.0 * d);
            pr.case_label = "q_below_threshold";
        } else {
            pr.exponent = upper;
            pr.case_label = "q_above_threshold";
        }
        break;
    }
    case Quantity::MassSq: {
        int c = a_case();
        if (c < 0) {
            pr.exponent = n2d / (d * g2);
            pr.case_label = "a_below";
        } else if (c == 0) {
            pr.exponent = n2d / (d * g2);
            pr.log_power = 1.0;
            pr.case_label = "a_at_boundary";
        } else {
            pr.exponent = n2d / (2.0 * d);
            pr.case_label = "a_above";
        }
        break;
    }
    case Quantity::RatioQc: {
        double qt = tail_threshold_q(N, a, b);
        double disc = (ex.q_c - qt) / qt;
        if (disc > tol) {
            int c = a_case();
            if (c < 0) {
                pr.exponent = 0.0;
                pr.case_label = "case1_a_below";
            } else if (c == 0) {
                pr.exponent = 0.0;
                pr.log_power = -2.0 * d / nab;
                pr.case_label = "case1_a_at_boundary";
            } else {
                pr.exponent = n2d * (4.0 + 2.0 * a - N) / (g2 * nab);
                pr.case_label = "case1_a_above";
            }
        } else {
            boundary_guard(disc, "q_c = N/(N-2(1+a)+b)");
            pr.exponent = n2d * (N - 4.0 + 6.0 * (b - a)) / (4.0 * d * nab);
            if (std::abs(disc) <= tol) {
                pr.log_power = 1.0;
                pr.case_label = "case2_boundary";
            } else {
                pr.case_label = "case2_interior";
            }
        }
        break;
    }
    }
    return pr;
}

std::vector<double> default_eps_list() {
    std::vector<double> e(8);
    for (int i = 0; i < 8; ++i) e[i] = std::pow(10.0, -4.0 + 3.0 * i / 7.0);
    return e;
}

GridPtr asymptotics_grid(int N) { return wide_grid(N); }

double asymptotic_quantity(Quantity quantity, const ProblemParams& p, double eps, const GridPtr& grid, double R) {
    Exponents ex = derive_exponents(p);
    const auto& g = *grid;
    const double ts = ex.two_sharp;
    BubbleSpec spec{eps, R, ex};
    RadialFunction u = cutoff_bubble(spec, grid);
    switch (quantity) {
    case Quantity::GradSq: {
        // distance to S^{N/2d}, read off against the uncut bubble on the same grid
        RadialFunction U = bubble(spec, grid);
        auto dU = midpoint_derivative(g, U.values());
        auto du = midpoint_derivative(g, u.values());
        auto w = dirichlet_weights(g, p.a);
        double s = 0.0;
        for (std::size_t i = 0; i < du.size(); ++i) s += w[i] * (dU[i] * dU[i] - du[i] * du[i]);
        return std::abs(s);
    }
    case Quantity::CritNorm: {
        RadialFunction U = bubble(spec, grid);
        auto w = quadrature_weights(g, g.N - p.b * ts);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) s += w[i] * (std::pow(U[i], ts) - std::pow(u[i], ts));
        return std::abs(s);
    }
    case Quantity::QNorm: return weighted_integral(u, p.q, p.b);
    case Quantity::MassSq: return weighted_integral(u, 2.0, p.a);
    case Quantity::CrossCrit: {
        // phi = 1
        auto w = quadrature_weights(g, g.N - p.b * ts);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) s += w[i] * std::pow(u[i], ts - 1.0);
        return s;
    }
    case Quantity::CrossMass: {
        auto w = quadrature_weights(g, g.N - 2.0 * p.a);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i) s += w[i] * u[i];
        return s;
    }
    case Quantity::RatioQc: {
        double nab = p.N - 2.0 * p.a + 2.0 * p.b;
        double B = weighted_integral(u, ex.q_c, p.b);
        double M = weighted_integral(u, 2.0, p.a);
        return B / std::pow(M, 2.0 * ex.d / nab);
    }
    }
    return 0.0;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorCode::BadInput, "need matching samples for a fit");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ss += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - ss / syy : 1.0;
    f.rms = std::sqrt(ss / n);
    return f;
}

AsymptoticsFit measure_asymptotics(Quantity quantity, const ProblemParams& p, const std::vector<double>& eps_list,
                                   const GridPtr& grid, bool strict, double R, bool boundary_branch) {
    if (eps_list.size() < 6) throw Error(ErrorCode::BadInput, "need at least 6 eps values");
    double ratio = eps_list[1] / eps_list[0];
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i - 1] > 0.0)) throw Error(ErrorCode::BadInput, "eps must be positive");
        if (std::abs(eps_list[i] / eps_list[i - 1] - ratio) > 1e-6 * ratio)
            throw Error(ErrorCode::BadInput, "eps list must be geometric");
    }
    AsymptoticsFit out;
    out.prediction = predict_asymptotics(quantity, p, boundary_branch);
    out.eps = eps_list;
    std::vector<double> x, y, ylog;
    for (double e : eps_list) {
        double v = asymptotic_quantity(quantity, p, e, grid, R);
        if (!(v > 0.0)) throw Error(ErrorCode::DegenerateProfile, "non-positive quantity at eps = " + fmt(e));
        out.values.push_back(v);
        x.push_back(std::log(e));
        y.push_back(std::log(v));
        ylog.push_back(std::log(v) - out.prediction.log_power * std::log(std::abs(std::log(e))));
    }
    out.plain = fit_line(x, y);
    out.log_used = out.prediction.log_power != 0.0;
    out.fit = out.log_used ? fit_line(x, ylog) : out.plain;
    if (strict && out.fit.r2 < 0.99)
        throw Error(ErrorCode::PoorFit, std::string(quantity_name(quantity)) + " fit r2 = " + fmt(out.fit.r2));
    return out;
}

const char* region_name(Region r) {
    switch (r) {
    case Region::Case1: return "Case1";
    case Region::Case2Boundary: return "Case2Boundary";
    case Region::Case2Interior: return "Case2Interior";
    }
    return "?";
}

RegionClass classify_region(int N, double a, double b) {
    if (N < 3 || !(a > 0.0 && a < (N - 2) / 2.0) || !(b > a && b < a + 1.0))
        throw Error(ErrorCode::OutsideStrip, "(a,b) = (" + fmt(a) + "," + fmt(b) + ") outside the admissible strip");
    RegionClass rc;
    rc.L1 = b - a;
    rc.L2 = b - a - 1.0;
    rc.q_c = mass_critical_q(N, a, b);
    rc.L3 = rc.q_c - tail_threshold_q(N, a, b);
    if (std::abs(rc.L3) <= 1e-12 * rc.q_c)
        rc.region = Region::Case2Boundary;
    else
        rc.region = rc.L3 > 0 ? Region::Case1 : Region::Case2Interior;
    return rc;
}

std::vector<RegionCell> region_map(int N, int resolution) {
    if (N < 3 || resolution < 2) throw Error(ErrorCode::BadInput, "need N >= 3 and resolution >= 2");
    const double amax = (N - 2) / 2.0, bmax = amax + 1.0;
    std::vector<RegionCell> cells;
    for (int i = 0; i < resolution; ++i) {
        double a = (i + 0.5) * amax / resolution;
        for (int j = 0; j < resolution; ++j) {
            double b = (j + 0.5) * bmax / resolution;
            if (!(b > a && b < a + 1.0)) continue;
            auto rc = classify_region(N, a, b);
            cells.push_back({a, b, rc.region, rc.q_c, rc.L3});
        }
    }
    return cells;
}

std::string region_map_csv(const std::vector<RegionCell>& cells) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "a,b,case,q_c,L3_discriminant\n";
    for (const auto& c : cells) os << c.a << ',' << c.b << ',' << region_name(c.region) << ',' << c.q_c << ',' << c.L3 << '\n';
    return os.str();
}

double case2_a_bound(int N) { return (N * N - 8.0) / (2.0 * (N + 2.0)); }

} // namespace ckn
