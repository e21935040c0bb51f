#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ckn {

// uniform in s = ln r
struct RadialGrid {
    double s_min = 0;
    double s_max = 0;
    double ds = 0;
    int n = 0;
    int N = 3;
    double omega = 0; // |S^{N-1}|
    std::vector<double> s;
    std::vector<double> r;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double s_min, double s_max, int n, int N);
// s in [ln 1e-6, ln 1e3], n = 2048
GridPtr default_grid(int N);
// s in [ln 1e-14, ln 1e3], n = 4096; profiles that approach u(0) like r^{1/2} need the extra decades
GridPtr wide_grid(int N);

double surface_area(int N);

class RadialFunction {
public:
    RadialFunction() = default;
    RadialFunction(GridPtr g, std::vector<double> v);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    bool is_zero() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

RadialFunction sample(const GridPtr& g, const std::function<double(double)>& f);

// omega * trapezoid weight * r^k ; integral of f(r) r^{k-1} dr = sum W_i f_i
std::vector<double> quadrature_weights(const RadialGrid& g, double k);

// omega * int r^{N-1-w q} |u|^q dr
double weighted_integral(const RadialFunction& u, double q, double w);
// (weighted_integral)^{1/q}
double weighted_norm(const RadialFunction& u, double q, double w);

// du/ds at the midpoints s_{i+1/2}, fourth order; length n-1
std::vector<double> midpoint_derivative(const RadialGrid& g, const std::vector<double>& u);
// transpose of midpoint_derivative applied to v (length n-1)
std::vector<double> midpoint_derivative_transpose(const RadialGrid& g, const std::vector<double>& v);
// omega * ds * r_{i+1/2}^{N-2-2a}
std::vector<double> dirichlet_weights(const RadialGrid& g, double a);

// omega * int r^{N-1-2a} u'(r)^2 dr
double dirichlet_energy(const RadialFunction& u, double a);

// r -> u(e^{shift} r)
RadialFunction resample(const RadialFunction& u, double shift_s);

void write_csv(const RadialFunction& u, const std::string& path);
std::string to_csv(const RadialFunction& u);
// rebuilds the log grid from the r column
RadialFunction read_csv(const std::string& path, int N);

} // namespace ckn
