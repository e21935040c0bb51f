#include "ckn/fiber.h"
#include "ckn/error.h"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>

namespace ckn {

namespace {

constexpr double kScanStep = 1e-2;
constexpr double kRootTol = 1e-12;

struct FiberExps {
    double qd, ts, dq;
};

FiberExps fiber_exps(const ProblemParams& p) {
    double dq = delta_q(p.N, p.a, p.b, p.q);
    double qd = is_mass_critical(p) ? 2.0 : p.q * dq;
    return {qd, two_sharp(p.N, p.a, p.b), dq};
}

// Phi'(t) e^{-2t}
double scaled_slope(const FiberCoefficients& c, const ProblemParams& p, const FiberExps& e, double t) {
    return c.A_grad - p.beta * e.dq * c.B_q * std::exp((e.qd - 2.0) * t) - c.C_crit * std::exp((e.ts - 2.0) * t);
}

// Phi(t) e^{-2t}
double scaled_value(const FiberCoefficients& c, const ProblemParams& p, const FiberExps& e, double t) {
    return 0.5 * c.A_grad - p.beta / p.q * c.B_q * std::exp((e.qd - 2.0) * t) -
           c.C_crit / e.ts * std::exp((e.ts - 2.0) * t);
}

double bracket_root(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t it = 200;
    auto tol = [](double x, double y) { return std::abs(y - x) <= kRootTol; };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
    return 0.5 * (r.first + r.second);
}

std::vector<double> scan_roots(const std::function<double(double)>& f) {
    std::vector<double> roots;
    int steps = static_cast<int>(std::lround((kFiberTMax - kFiberTMin) / kScanStep));
    double t0 = kFiberTMin, f0 = f(t0);
    for (int k = 1; k <= steps; ++k) {
        double t1 = kFiberTMin + k * kScanStep, f1 = f(t1);
        if (f0 == 0.0)
            roots.push_back(t0);
        else if (f0 * f1 < 0.0)
            roots.push_back(bracket_root(f, t0, t1));
        t0 = t1;
        f0 = f1;
    }
    return roots;
}

int sign(double x) { return (x > 0) - (x < 0); }

} // namespace

const char* branch_name(Branch b) {
    switch (b) {
    case Branch::Plus: return "Plus";
    case Branch::Minus: return "Minus";
    case Branch::Degenerate: return "Degenerate";
    }
    return "?";
}

double fiber_phi(const FiberCoefficients& c, const ProblemParams& p, double t) {
    auto e = fiber_exps(p);
    return std::exp(2.0 * t) * c.A_grad / 2.0 - p.beta * std::exp(e.qd * t) * c.B_q / p.q -
           std::exp(e.ts * t) * c.C_crit / e.ts;
}

double fiber_dphi(const FiberCoefficients& c, const ProblemParams& p, double t) {
    auto e = fiber_exps(p);
    return std::exp(2.0 * t) * c.A_grad - p.beta * e.dq * std::exp(e.qd * t) * c.B_q -
           std::exp(e.ts * t) * c.C_crit;
}

double fiber_d2phi(const FiberCoefficients& c, const ProblemParams& p, double t) {
    auto e = fiber_exps(p);
    return 2.0 * std::exp(2.0 * t) * c.A_grad - p.beta * e.dq * e.qd * std::exp(e.qd * t) * c.B_q -
           e.ts * std::exp(e.ts * t) * c.C_crit;
}

FiberReport analyze_fiber(const FiberCoefficients& c, const ProblemParams& p, std::optional<double> beta1_est) {
    Exponents ex = derive_exponents(p);
    if (!(c.C_crit > 0.0)) throw Error(ErrorCode::DegenerateCoefficients, "C = 0, no critical structure");
    if (!(c.A_grad > 0.0)) throw Error(ErrorCode::DegenerateCoefficients, "A = 0");
    auto e = fiber_exps(p);
    const bool sub_active = p.beta > 0.0 && c.B_q > 0.0;

    FiberReport rep;
    rep.coefficients = c;
    rep.regime = ex.regime;

    auto slope = [&](double t) { return scaled_slope(c, p, e, t); };
    auto value = [&](double t) { return scaled_value(c, p, e, t); };

    // the asymptotic signs must already be visible at the window ends
    int left_expected;
    if (sub_active && e.qd < 2.0)
        left_expected = -1;
    else if (sub_active && e.qd == 2.0)
        left_expected = sign(c.A_grad - p.beta * e.dq * c.B_q);
    else
        left_expected = 1;
    if (left_expected != 0 && sign(slope(kFiberTMin)) != left_expected)
        throw Error(ErrorCode::ScanWindowExhausted, "left end of the t window does not show the asymptotic sign");
    if (sign(slope(kFiberTMax)) != -1)
        throw Error(ErrorCode::ScanWindowExhausted, "right end of the t window does not show the asymptotic sign");

    for (double t : scan_roots(slope)) {
        CriticalPoint cp;
        cp.t = t;
        cp.phi = fiber_phi(c, p, t);
        cp.phi2 = fiber_d2phi(c, p, t);
        double scale = std::exp(2.0 * t) * c.A_grad + p.beta * e.dq * e.dq * p.q * std::exp(e.qd * t) * c.B_q +
                       e.ts * std::exp(e.ts * t) * c.C_crit;
        if (std::abs(cp.phi2) < 1e-8 * scale)
            cp.branch = Branch::Degenerate;
        else
            cp.branch = cp.phi2 > 0 ? Branch::Plus : Branch::Minus;
        rep.criticals.push_back(cp);
    }
    rep.zeros = scan_roots(value);

    auto single_max = [&]() {
        return rep.criticals.size() == 1 && rep.criticals[0].branch == Branch::Minus && rep.criticals[0].phi > 0.0;
    };
    auto two_point = [&]() {
        if (rep.criticals.size() != 2 || rep.zeros.size() != 2) return false;
        const auto &c1 = rep.criticals[0], &c2 = rep.criticals[1];
        double s1 = rep.zeros[0], s2 = rep.zeros[1];
        return c1.branch == Branch::Plus && c2.branch == Branch::Minus && c1.t < s1 && s1 < c2.t && c2.t < s2 &&
               c1.phi < 0.0 && c2.phi > 0.0;
    };

    bool ok;
    std::string label;
    if (!sub_active || ex.regime != Regime::Subcritical) {
        ok = single_max();
        label = ok ? "ok" : "violated";
        if (ex.regime == Regime::MassCritical && sub_active && 0.5 * c.A_grad - p.beta / p.q * c.B_q <= 0.0) {
            ok = false;
            label = "no_claim";
        }
    } else if (beta1_est) {
        if (p.beta < 0.95 * *beta1_est) {
            ok = two_point();
            label = ok ? "ok" : "violated";
        } else if (p.beta <= 1.05 * *beta1_est) {
            ok = false;
            label = "inconclusive";
        } else {
            ok = false;
            label = "no_claim";
        }
    } else {
        ok = two_point();
        label = ok ? "ok" : "violated";
    }
    rep.structure_ok = ok;
    rep.structure_label = label;
    return rep;
}

FiberReport analyze_fiber(const RadialFunction& u, const ProblemParams& p, std::optional<double> beta1_est) {
    return analyze_fiber(fiber_coefficients(u, p), p, beta1_est);
}

Projection project_with_shift(const RadialFunction& u, const ProblemParams& p, Branch branch) {
    auto rep = analyze_fiber(u, p);
    const CriticalPoint* pick = nullptr;
    for (const auto& cp : rep.criticals) {
        if (cp.branch != branch) continue;
        if (branch == Branch::Plus) {
            if (!pick) pick = &cp;
        } else {
            pick = &cp;
        }
    }
    if (!pick) throw Error(ErrorCode::BranchAbsent, std::string("fiber has no ") + branch_name(branch) + " point");

    const double m0 = mass_sq(u, p.a);
    auto at = [&](double t) {
        RadialFunction v = dilate(u, t, p);
        double f = std::sqrt(m0 / mass_sq(v, p.a));
        for (auto& x : v.values()) x *= f;
        return v;
    };
    auto P = [&](double t) { return pohozaev(at(t), p); };

    // the coefficient root is exact for the continuous dilation; interpolation moves it slightly
    double t0 = pick->t, h = 1e-4;
    double lo = t0 - h, hi = t0 + h, flo = P(lo), fhi = P(hi);
    for (int k = 0; k < 12 && flo * fhi > 0.0; ++k) {
        h *= 4.0;
        lo = t0 - h;
        hi = t0 + h;
        flo = P(lo);
        fhi = P(hi);
    }
    double t = t0;
    if (flo * fhi <= 0.0) {
        std::uintmax_t it = 100;
        auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-15; };
        auto r = boost::math::tools::toms748_solve(P, lo, hi, flo, fhi, tol, it);
        double pa = std::abs(P(r.first)), pb = std::abs(P(r.second));
        t = pa <= pb ? r.first : r.second;
    }
    return {at(t), t};
}

RadialFunction project_to_manifold(const RadialFunction& u, const ProblemParams& p, Branch branch) {
    return project_with_shift(u, p, branch).u;
}

double envelope_f(const ProblemParams& p, double S_ab, double C_ab, double t) {
    double dq = delta_q(p.N, p.a, p.b, p.q), ts = two_sharp(p.N, p.a, p.b);
    double K = p.beta / p.q * std::pow(C_ab, p.q) * std::pow(p.rho, (1.0 - dq) * p.q);
    return 0.5 * t * t - K * std::pow(t, p.q * dq) - std::pow(t, ts) / (ts * std::pow(S_ab, ts / 2.0));
}

EnvelopeReport envelope(const ProblemParams& p, double S_ab, double C_ab) {
    Exponents ex = derive_exponents(p);
    if (ex.regime != Regime::Subcritical) throw Error(ErrorCode::RegimeMismatch, "envelope needs q < q_c");
    const double dq = ex.delta_q, ts = ex.two_sharp, qd = p.q * dq;
    const double Sp = std::pow(S_ab, ts / 2.0);

    EnvelopeReport r;
    r.K = p.beta / p.q * std::pow(C_ab, p.q) * std::pow(p.rho, (1.0 - dq) * p.q);
    double X = ts * Sp * (2.0 - qd) / (2.0 * (ts - qd));
    r.t_tilde = std::pow(X, 1.0 / (ts - 2.0));
    r.h_max = (ts - 2.0) / (2.0 * (ts - qd)) * std::pow(X, (2.0 - qd) / (ts - 2.0));

    auto H = [&](double t) { return 0.5 * std::pow(t, 2.0 - qd) - std::pow(t, ts - qd) / (ts * Sp) - r.K; };
    double gap = r.h_max - r.K;
    if (gap < -1e-12 * r.h_max) {
        std::ostringstream os;
        os.precision(17);
        os << "f <= 0 everywhere: h(t~) = " << r.h_max << " < " << r.K;
        throw Error(ErrorCode::NoPositiveInterval, os.str());
    }
    if (gap <= 1e-12 * r.h_max) {
        // touching case: f has a double zero at t~
        r.kappa_tilde = r.kappa_hat = r.t_tilde;
        r.positive_interval_nonempty = false;
        return r;
    }
    r.positive_interval_nonempty = true;
    std::uintmax_t it = 300;
    auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-15 * std::max(std::abs(x), 1e-300); };
    if (r.K == 0.0) {
        r.kappa_tilde = 0.0;
    } else {
        auto lo = boost::math::tools::toms748_solve(H, 0.0, r.t_tilde, -r.K, gap, tol, it);
        r.kappa_tilde = 0.5 * (lo.first + lo.second);
    }
    double hi = 2.0 * r.t_tilde;
    while (H(hi) > 0.0) hi *= 2.0;
    it = 300;
    auto up = boost::math::tools::toms748_solve(H, r.t_tilde, hi, tol, it);
    r.kappa_hat = 0.5 * (up.first + up.second);
    return r;
}

LowerBoundCheck lower_bound_detail(const RadialFunction& u, const ProblemParams& p, double S_ab, double C_ab) {
    double m = mass_sq(u, p.a);
    if (std::abs(m - p.rho * p.rho) > 1e-8 * p.rho * p.rho)
        throw Error(ErrorCode::BadInput, "profile is not on the mass sphere");
    auto c = fiber_coefficients(u, p);
    LowerBoundCheck lb;
    lb.energy = energy(c, p);
    lb.envelope = envelope_f(p, S_ab, C_ab, std::sqrt(c.A_grad));
    lb.holds = lb.energy >= lb.envelope - 1e-12 * (std::abs(lb.energy) + std::abs(lb.envelope));
    return lb;
}

bool check_lower_bound(const RadialFunction& u, const ProblemParams& p, double S_ab, double C_ab) {
    return lower_bound_detail(u, p, S_ab, C_ab).holds;
}

} // namespace ckn
