#pragma once

#include "ckn/functionals.h"
#include "ckn/params.h"

#include <optional>
#include <string>
#include <vector>

namespace ckn {

enum class Branch { Plus, Minus, Degenerate };
const char* branch_name(Branch b);

struct CriticalPoint {
    double t = 0;
    double phi = 0;
    double phi2 = 0;
    Branch branch = Branch::Degenerate;
};

struct FiberReport {
    FiberCoefficients coefficients;
    Regime regime = Regime::Subcritical;
    std::vector<CriticalPoint> criticals;
    std::vector<double> zeros;
    bool structure_ok = false;
    // ok, violated, inconclusive, no_claim
    std::string structure_label;
};

struct EnvelopeReport {
    double t_tilde = 0;
    double h_max = 0;
    double kappa_tilde = 0;
    double kappa_hat = 0;
    bool positive_interval_nonempty = false;
    double K = 0; // (beta/q) C^q rho^{(1-delta)q}
};

struct Projection {
    RadialFunction u;
    double t = 0;
};

struct LowerBoundCheck {
    double energy = 0;
    double envelope = 0; // f(|| |x|^{-a} grad u ||_2)
    bool holds = false;
};

// t window of the dense scan
constexpr double kFiberTMin = -40.0;
constexpr double kFiberTMax = 20.0;

double fiber_phi(const FiberCoefficients& c, const ProblemParams& p, double t);
double fiber_dphi(const FiberCoefficients& c, const ProblemParams& p, double t);
double fiber_d2phi(const FiberCoefficients& c, const ProblemParams& p, double t);

// beta1_est switches on the threshold-aware structure verdict
FiberReport analyze_fiber(const FiberCoefficients& c, const ProblemParams& p,
                          std::optional<double> beta1_est = std::nullopt);
FiberReport analyze_fiber(const RadialFunction& u, const ProblemParams& p,
                          std::optional<double> beta1_est = std::nullopt);

// dilation onto M+ or M-, t refined on the discrete Pohozaev functional;
// the result carries the mass of u exactly
Projection project_with_shift(const RadialFunction& u, const ProblemParams& p, Branch branch);
RadialFunction project_to_manifold(const RadialFunction& u, const ProblemParams& p, Branch branch);

double envelope_f(const ProblemParams& p, double S_ab, double C_ab, double t);
EnvelopeReport envelope(const ProblemParams& p, double S_ab, double C_ab);

LowerBoundCheck lower_bound_detail(const RadialFunction& u, const ProblemParams& p, double S_ab, double C_ab);
bool check_lower_bound(const RadialFunction& u, const ProblemParams& p, double S_ab, double C_ab);

} // namespace ckn
