#pragma once

#include <string>

namespace ckn {

struct ProblemParams {
    int N = 3;
    double a = 0.25;
    double b = 0.5;
    double q = 2.5;
    double beta = 0.0;
    double rho = 1.0;
};

enum class Regime { Subcritical, MassCritical, Supercritical };
const char* regime_name(Regime r);

struct Exponents {
    double d = 0;
    double two_sharp = 0;
    double delta_q = 0;
    double q_c = 0;
    double alpha_bubble = 0;
    double A_bubble = 0;
    Regime regime = Regime::Subcritical;
};

// beta* is either a number or "no constraint at all"
class BetaBound {
public:
    static BetaBound finite(double v) { return BetaBound(false, v); }
    static BetaBound unbounded() { return BetaBound(true, 0.0); }
    bool is_unbounded() const { return unbounded_; }
    double value() const; // throws on the unbounded variant
    bool admits(double beta) const { return unbounded_ || beta < value_; }

private:
    BetaBound(bool u, double v) : unbounded_(u), value_(v) {}
    bool unbounded_;
    double value_;
};

enum class BetaStarBranch { Auto, MassCritical };

struct Thresholds {
    double beta1 = 0;
    double beta2 = 0;
    double beta_star_sub = 0;
    BetaBound beta_star_crit = BetaBound::unbounded();
    std::string beta_star_case;
    // beta at which h(t~) = (beta/q) C^q rho^{(1-delta)q}; see envelope()
    double beta1_envelope = 0;
    double S_ab = 0;
    double C_ab = 0;
    bool n3_extra_condition_applies = false;
    bool n3_extra_condition_met = true;
};

ProblemParams validate(double N, double a, double b, double q, double beta, double rho);
void validate(const ProblemParams& p);

double two_sharp(int N, double a, double b);
double delta_q(int N, double a, double b, double q);
double mass_critical_q(int N, double a, double b);
// N / (N - 2(1+a) + b), the splitting power of the bubble tail
double tail_threshold_q(int N, double a, double b);

Exponents derive_exponents(const ProblemParams& p);
bool is_mass_critical(const ProblemParams& p);

Thresholds thresholds(const ProblemParams& p, double S_ab, double C_ab,
                      BetaStarBranch branch = BetaStarBranch::Auto);

// (N - 2d)/(2d), the power that keeps showing up
double half_gap(const Exponents& ex, int N);

} // namespace ckn
