#include "ckn/params.h"
#include "ckn/error.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ckn {

namespace {

constexpr double kRegimeTol = 1e-12;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::MassCritical: return "MassCritical";
    case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}

double BetaBound::value() const {
    if (unbounded_) throw Error(ErrorCode::BadInput, "beta* is unbounded, no finite value");
    return value_;
}

double two_sharp(int N, double a, double b) {
    double d = 1.0 + a - b;
    return 2.0 * N / (N - 2.0 * d);
}

double delta_q(int N, double a, double b, double q) {
    return ((N - 2.0 * a + 2.0 * b) * q - 2.0 * N) / (2.0 * q);
}

double mass_critical_q(int N, double a, double b) {
    return (4.0 + 2.0 * N) / (N - 2.0 * a + 2.0 * b);
}

double tail_threshold_q(int N, double a, double b) {
    return N / (N - 2.0 * (1.0 + a) + b);
}

void validate(const ProblemParams& p) {
    if (p.N < 3) throw Error(ErrorCode::DimensionTooSmall, "need N >= 3, got " + std::to_string(p.N));
    double amax = (p.N - 2) / 2.0;
    if (!(p.a > 0.0 && p.a < amax))
        throw Error(ErrorCode::WeightOutOfRange, "need 0 < a < (N-2)/2 = " + fmt(amax) + ", got a = " + fmt(p.a));
    if (!(p.b > p.a && p.b < p.a + 1.0))
        throw Error(ErrorCode::OffsetOutOfRange, "need a < b < a+1, got b = " + fmt(p.b));
    double ts = two_sharp(p.N, p.a, p.b);
    if (!(p.q > 2.0 && p.q < ts))
        throw Error(ErrorCode::PowerOutOfRange, "need 2 < q < 2# = " + fmt(ts) + ", got q = " + fmt(p.q));
    if (!(p.rho > 0.0) || !std::isfinite(p.rho))
        throw Error(ErrorCode::NonPositiveMass, "need rho > 0, got " + fmt(p.rho));
    if (!(p.beta >= 0.0) || !std::isfinite(p.beta))
        throw Error(ErrorCode::NegativeCoupling, "need beta >= 0, got " + fmt(p.beta));
}

ProblemParams validate(double N, double a, double b, double q, double beta, double rho) {
    if (!std::isfinite(N) || N != std::floor(N) || N < 3)
        throw Error(ErrorCode::DimensionTooSmall, "N must be an integer >= 3, got " + fmt(N));
    ProblemParams p{static_cast<int>(N), a, b, q, beta, rho};
    validate(p);
    return p;
}

bool is_mass_critical(const ProblemParams& p) {
    double qc = mass_critical_q(p.N, p.a, p.b);
    return std::abs(p.q - qc) / qc <= kRegimeTol;
}

Exponents derive_exponents(const ProblemParams& p) {
    validate(p);
    Exponents e;
    int N = p.N;
    e.d = 1.0 + p.a - p.b;
    e.two_sharp = 2.0 * N / (N - 2.0 * e.d);
    e.delta_q = delta_q(N, p.a, p.b, p.q);
    e.q_c = mass_critical_q(N, p.a, p.b);
    e.alpha_bubble = 2.0 * e.d * (N - 2.0 - 2.0 * p.a) / (N - 2.0 * e.d);
    double h = (N - 2) / 2.0 - p.a;
    e.A_bubble = h * h;
    if (is_mass_critical(p))
        e.regime = Regime::MassCritical;
    else
        e.regime = p.q < e.q_c ? Regime::Subcritical : Regime::Supercritical;
    return e;
}

double half_gap(const Exponents& ex, int N) { return (N - 2.0 * ex.d) / (2.0 * ex.d); }

Thresholds thresholds(const ProblemParams& p, double S_ab, double C_ab, BetaStarBranch branch) {
    Exponents ex = derive_exponents(p);
    if (!(S_ab > 0.0) || !std::isfinite(S_ab)) throw Error(ErrorCode::InvalidConstant, "S_ab must be positive");
    if (!(C_ab > 0.0) || !std::isfinite(C_ab)) throw Error(ErrorCode::InvalidConstant, "C_ab must be positive");
    if (branch == BetaStarBranch::MassCritical && ex.regime != Regime::MassCritical)
        throw Error(ErrorCode::RegimeMismatch, "mass-critical beta* requested with q = " + fmt(p.q) +
                                                   " != q_c = " + fmt(ex.q_c));

    const int N = p.N;
    const double q = p.q, ts = ex.two_sharp, dq = ex.delta_q, qd = q * dq, d = ex.d;
    const double Cq = std::pow(C_ab, q);
    const double rho_pow = std::pow(p.rho, (1.0 - dq) * q);

    Thresholds t;
    t.S_ab = S_ab;
    t.C_ab = C_ab;

    if (qd < 2.0) {
        double X = ts * std::pow(S_ab, ts / 2.0) * (2.0 - qd) / (2.0 * (ts - qd));
        double Xp = std::pow(X, (2.0 - qd) / (ts - 2.0));
        t.beta1 = q * (ts - 2.0) / (Cq * rho_pow * (ts - qd)) * Xp;
        // q h(t~) / (C^q rho^..), with h(t~) = (2#-2)/(2(2#-q delta)) X^{..}
        t.beta1_envelope = q * (ts - 2.0) / (2.0 * (ts - qd)) * Xp / (Cq * rho_pow);
        double Y = qd * std::pow(S_ab, N / (2.0 * d)) / (2.0 - qd);
        t.beta2 = 2.0 * ts / (N * dq * Cq * (ts - qd) * rho_pow) * std::pow(Y, (2.0 - qd) / 2.0);
        t.beta_star_sub = std::min(t.beta1, t.beta2);
    } else {
        t.beta1 = t.beta2 = t.beta_star_sub = t.beta1_envelope = std::numeric_limits<double>::quiet_NaN();
    }

    const double qt = tail_threshold_q(N, p.a, p.b);
    if (ex.regime == Regime::MassCritical) {
        double Cqc = std::pow(C_ab, ex.q_c);
        t.beta_star_crit = BetaBound::finite(ex.q_c / (std::pow(p.rho, 4.0 * d / (N - 2.0 * p.a + 2.0 * p.b)) * 2.0 * Cqc));
        t.beta_star_case = "mass_critical";
    } else if (ex.regime == Regime::Supercritical) {
        bool cond = qt < ex.q_c && ex.q_c < q && q < ts && p.a > 0.0 && p.a < std::max((N - 4) / 2.0, 0.0);
        if (cond) {
            double v = std::pow(S_ab, N * (2.0 - qd) / (2.0 * d)) / (Cq * rho_pow * dq);
            t.beta_star_crit = BetaBound::finite(v);
            t.beta_star_case = "supercritical_bounded";
        } else {
            t.beta_star_crit = BetaBound::unbounded();
            t.beta_star_case = "unbounded";
        }
    } else {
        t.beta_star_crit = BetaBound::unbounded();
        t.beta_star_case = "not_applicable_subcritical";
    }

    if (N == 3) {
        double lo = 10.0 / (3.0 - 2.0 * p.a + 2.0 * p.b);
        double hi = 3.0 / (1.0 - 2.0 * p.a + p.b);
        t.n3_extra_condition_applies = (q >= lo * (1.0 - kRegimeTol)) && q < hi;
        t.n3_extra_condition_met = !t.n3_extra_condition_applies || (p.b - p.a) > 1.0 / 6.0;
    }
    return t;
}

} // namespace ckn
