#pragma once

#include "ckn/grid.h"
#include "ckn/params.h"

#include <cmath>
#include <string>
#include <vector>

namespace ckn {

struct FiberCoefficients {
    double A_grad = 0; // || |x|^{-a} grad u ||_2^2
    double B_q = 0;    // || |x|^{-b} u ||_q^q
    double C_crit = 0; // || |x|^{-b} u ||_{2#}^{2#}
};

struct SolutionReport {
    RadialFunction profile;
    double lambda = 0; // Rayleigh value
    double lambda_pohozaev = 0;
    double energy = 0;
    double mass_sq = 0;
    double pohozaev = 0;
    double el_residual = 0;
    double grad_norm = 0;
    FiberCoefficients coefficients;
    int iterations = 0;
    bool converged = false;
    int left_ball_events = 0;
    std::vector<double> energy_history;
    std::vector<std::string> warnings;
};

struct LambdaPair {
    double rayleigh = 0;
    double pohozaev = 0;
};

struct CriticalFit {
    double c = 0;
    double residual = 0;
};

double mass_sq(const RadialFunction& u, double a);
FiberCoefficients fiber_coefficients(const RadialFunction& u, const ProblemParams& p);

double energy(const FiberCoefficients& c, const ProblemParams& p);
double energy(const RadialFunction& u, const ProblemParams& p);
double pohozaev(const FiberCoefficients& c, const ProblemParams& p);
double pohozaev(const RadialFunction& u, const ProblemParams& p);

// r -> e^{(N-2a)t/2} u(e^t r)
RadialFunction dilate(const RadialFunction& u, double t, const ProblemParams& p);

// dE/du_i of the discrete energy
std::vector<double> energy_gradient(const RadialFunction& u, const ProblemParams& p);

double el_residual(const RadialFunction& u, double lambda, const ProblemParams& p);
// least-squares c in -div(|x|^{-2a} grad u) = c |x|^{-b 2#} u^{2#-1}
CriticalFit fit_critical_coefficient(const RadialFunction& u, const ProblemParams& p);

LambdaPair lambda_identity(const RadialFunction& u, const ProblemParams& p);

// |u|^{s-2}u
inline double signed_pow(double x, double s) {
    double m = std::abs(x);
    return x < 0 ? -std::pow(m, s - 1.0) : std::pow(m, s - 1.0);
}

} // namespace ckn
