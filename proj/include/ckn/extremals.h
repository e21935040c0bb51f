#pragma once

#include "ckn/grid.h"
#include "ckn/params.h"

#include <cstdint>
#include <string>
#include <vector>

namespace ckn {

struct BubbleSpec {
    double eps = 1.0;
    double cutoff_R = 1.0;
    Exponents exponents;
};

RadialFunction bubble(const BubbleSpec& spec, const GridPtr& grid);
// zeta U_eps, zeta the C^1 cubic smoothstep: 1 on [0,R], 0 beyond 2R
RadialFunction cutoff_bubble(const BubbleSpec& spec, const GridPtr& grid);
double smoothstep_cutoff(double r, double R);

// log window wide enough that the eps = 1 bubble tails are below 1e-13
GridPtr constants_grid(const ProblemParams& p);

// A/C^{2/2#} of U_1 on the grid
double bubble_quotient(const ProblemParams& p, const GridPtr& grid, double eps);
// estimated relative error of the eps-quotient from the truncated tails
double bubble_tail_error(const ProblemParams& p, const RadialGrid& grid, double eps);
double best_constant_S(const ProblemParams& p, const GridPtr& grid);

struct DescentResult {
    double S = 0;
    int iterations = 0;
    bool converged = false;
    RadialFunction profile;
};
// independent estimate: preconditioned descent of A/C^{2/2#} from a Gaussian
DescentResult rayleigh_descent_S(const ProblemParams& p, const GridPtr& grid, int max_iters = 400);

struct InterpConstant {
    double C = 0;
    double Cq = 0;
    double family_lower_bound = 0; // max of the ratio over the test family
    std::string family_best;
    int iterations = 0;
    bool converged = false;
    RadialFunction optimizer;
};

// B_q / (A^{q delta/2} M^{(1-delta)q/2})
double interpolation_ratio(const RadialFunction& u, const ProblemParams& p);
InterpConstant interp_constant_C(const ProblemParams& p, const GridPtr& grid, std::uint64_t seed = 0);

enum class Quantity { GradSq, CritNorm, QNorm, MassSq, CrossCrit, CrossMass, RatioQc };
const char* quantity_name(Quantity q);
Quantity parse_quantity(const std::string& s);

struct AsymptoticsPrediction {
    Quantity quantity = Quantity::GradSq;
    double exponent = 0;
    double log_power = 0;
    std::string case_label;
};

AsymptoticsPrediction predict_asymptotics(Quantity quantity, const ProblemParams& p, bool boundary_branch = false);

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double rms = 0;
};

struct AsymptoticsFit {
    AsymptoticsPrediction prediction;
    std::vector<double> eps;
    std::vector<double> values;
    LineFit fit;   // with the predicted log factor divided out
    LineFit plain; // pure power law
    bool log_used = false;
};

// default eps sweep: 8 geometric points on [1e-4, 1e-1]
std::vector<double> default_eps_list();
// bubbles down to eps = 1e-4 concentrate near r = 1e-8; this window reaches 1e-14
GridPtr asymptotics_grid(int N);

// measured value of the quantity for one eps
double asymptotic_quantity(Quantity quantity, const ProblemParams& p, double eps, const GridPtr& grid, double R = 1.0);

AsymptoticsFit measure_asymptotics(Quantity quantity, const ProblemParams& p, const std::vector<double>& eps_list,
                                   const GridPtr& grid, bool strict = true, double R = 1.0,
                                   bool boundary_branch = false);

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class Region { Case1, Case2Boundary, Case2Interior };
const char* region_name(Region r);

struct RegionClass {
    Region region = Region::Case1;
    double L1 = 0; // b - a
    double L2 = 0; // b - a - 1
    double L3 = 0; // q_c - N/(N-2(1+a)+b)
    double q_c = 0;
};

RegionClass classify_region(int N, double a, double b);

struct RegionCell {
    double a = 0;
    double b = 0;
    Region region = Region::Case1;
    double q_c = 0;
    double L3 = 0;
};

std::vector<RegionCell> region_map(int N, int resolution);
std::string region_map_csv(const std::vector<RegionCell>& cells);
// a-projection of the Case 2 region starts here
double case2_a_bound(int N);

} // namespace ckn
