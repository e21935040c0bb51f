#include "ckn/functionals.h"
#include "ckn/error.h"

#include <cmath>

namespace ckn {

namespace {

constexpr int kEdge = 3; // nodes dropped at each end of the residual

struct StrongForm {
    std::vector<double> lhs;
    std::vector<double> weight;
};

// -r^{k-N}(u_ss + k u_s), k = N-2-2a, fourth-order centred stencils in s
StrongForm strong_lhs(const RadialFunction& u, double a) {
    const auto& g = u.grid();
    const int n = g.n;
    const double h = g.ds, k = g.N - 2.0 - 2.0 * a;
    StrongForm sf;
    sf.lhs.assign(n, 0.0);
    sf.weight.assign(n, 0.0);
    for (int i = 2; i < n - 2; ++i) {
        double us = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h);
        double uss = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * h * h);
        sf.lhs[i] = -std::exp((k - g.N) * g.s[i]) * (uss + k * us);
        // the flux form in L^2(dr): r^{N-1} on both sides, dr = r ds
        sf.weight[i] = std::exp((2.0 * g.N - 1.0) * g.s[i]);
    }
    return sf;
}

} // namespace

double mass_sq(const RadialFunction& u, double a) { return weighted_integral(u, 2.0, a); }

FiberCoefficients fiber_coefficients(const RadialFunction& u, const ProblemParams& p) {
    FiberCoefficients c;
    c.A_grad = dirichlet_energy(u, p.a);
    c.B_q = weighted_integral(u, p.q, p.b);
    c.C_crit = weighted_integral(u, two_sharp(p.N, p.a, p.b), p.b);
    return c;
}

double energy(const FiberCoefficients& c, const ProblemParams& p) {
    double ts = two_sharp(p.N, p.a, p.b);
    return 0.5 * c.A_grad - p.beta / p.q * c.B_q - c.C_crit / ts;
}

double energy(const RadialFunction& u, const ProblemParams& p) { return energy(fiber_coefficients(u, p), p); }

double pohozaev(const FiberCoefficients& c, const ProblemParams& p) {
    return c.A_grad - p.beta * delta_q(p.N, p.a, p.b, p.q) * c.B_q - c.C_crit;
}

double pohozaev(const RadialFunction& u, const ProblemParams& p) { return pohozaev(fiber_coefficients(u, p), p); }

RadialFunction dilate(const RadialFunction& u, double t, const ProblemParams& p) {
    RadialFunction v = resample(u, t);
    double f = std::exp(0.5 * (p.N - 2.0 * p.a) * t);
    for (auto& x : v.values()) x *= f;
    return v;
}

std::vector<double> energy_gradient(const RadialFunction& u, const ProblemParams& p) {
    const auto& g = u.grid();
    const double ts = two_sharp(p.N, p.a, p.b);
    auto du = midpoint_derivative(g, u.values());
    auto wa = dirichlet_weights(g, p.a);
    for (std::size_t i = 0; i < du.size(); ++i) du[i] *= wa[i];
    auto grad = midpoint_derivative_transpose(g, du);
    auto wb = quadrature_weights(g, g.N - p.b * p.q);
    auto wc = quadrature_weights(g, g.N - p.b * ts);
    for (int i = 0; i < g.n; ++i)
        grad[i] -= p.beta * wb[i] * signed_pow(u[i], p.q) + wc[i] * signed_pow(u[i], ts);
    return grad;
}

double el_residual(const RadialFunction& u, double lambda, const ProblemParams& p) {
    if (u.is_zero()) return 0.0;
    const auto& g = u.grid();
    const double ts = two_sharp(p.N, p.a, p.b);
    auto sf = strong_lhs(u, p.a);
    double num = 0.0, den = 0.0;
    for (int i = kEdge; i < g.n - kEdge; ++i) {
        double s = g.s[i];
        double rhs = lambda * std::exp(-2.0 * p.a * s) * u[i] +
                     p.beta * std::exp(-p.b * p.q * s) * signed_pow(u[i], p.q) +
                     std::exp(-p.b * ts * s) * signed_pow(u[i], ts);
        double res = sf.lhs[i] - rhs;
        num += sf.weight[i] * res * res;
        den += sf.weight[i] * rhs * rhs;
    }
    if (!(den > 1e-300)) throw Error(ErrorCode::DegenerateProfile, "right-hand side norm underflows");
    return std::sqrt(num / den);
}

CriticalFit fit_critical_coefficient(const RadialFunction& u, const ProblemParams& p) {
    const auto& g = u.grid();
    const double ts = two_sharp(p.N, p.a, p.b);
    auto sf = strong_lhs(u, p.a);
    std::vector<double> src(g.n, 0.0);
    double num = 0.0, den = 0.0;
    for (int i = kEdge; i < g.n - kEdge; ++i) {
        src[i] = std::exp(-p.b * ts * g.s[i]) * signed_pow(u[i], ts);
        num += sf.weight[i] * sf.lhs[i] * src[i];
        den += sf.weight[i] * src[i] * src[i];
    }
    if (!(den > 1e-300)) throw Error(ErrorCode::DegenerateProfile, "source term underflows");
    CriticalFit fit;
    fit.c = num / den;
    double rn = 0.0;
    for (int i = kEdge; i < g.n - kEdge; ++i) {
        double res = sf.lhs[i] - fit.c * src[i];
        rn += sf.weight[i] * res * res;
    }
    fit.residual = std::sqrt(rn / (fit.c * fit.c * den));
    return fit;
}

LambdaPair lambda_identity(const RadialFunction& u, const ProblemParams& p) {
    if (u.is_zero()) throw Error(ErrorCode::ZeroProfile, "lambda undefined for u = 0");
    auto c = fiber_coefficients(u, p);
    double m = mass_sq(u, p.a);
    LambdaPair l;
    l.rayleigh = (c.A_grad - p.beta * c.B_q - c.C_crit) / m;
    l.pohozaev = p.beta * (delta_q(p.N, p.a, p.b, p.q) - 1.0) * c.B_q / (p.rho * p.rho);
    return l;
}

} // namespace ckn
