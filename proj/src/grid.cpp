#include "ckn/grid.h"
#include "ckn/error.h"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>

#include <cmath>
#include <fstream>
#include <locale>
#include <sstream>

namespace ckn {

double surface_area(int N) { return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0); }

GridPtr make_grid(double s_min, double s_max, int n, int N) {
    if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max))
        throw Error(ErrorCode::BadGridSpec, "need s_min < s_max");
    if (n < 64) throw Error(ErrorCode::BadGridSpec, "need n >= 64, got " + std::to_string(n));
    if (N < 1) throw Error(ErrorCode::BadGridSpec, "bad dimension");
    auto g = std::make_shared<RadialGrid>();
    g->s_min = s_min;
    g->s_max = s_max;
    g->n = n;
    g->N = N;
    g->ds = (s_max - s_min) / (n - 1);
    g->omega = surface_area(N);
    g->s.resize(n);
    g->r.resize(n);
    for (int i = 0; i < n; ++i) {
        g->s[i] = s_min + i * g->ds;
        g->r[i] = std::exp(g->s[i]);
    }
    return g;
}

GridPtr default_grid(int N) { return make_grid(std::log(1e-6), std::log(1e3), 2048, N); }

GridPtr wide_grid(int N) { return make_grid(std::log(1e-14), std::log(1e3), 4096, N); }

RadialFunction::RadialFunction(GridPtr g, std::vector<double> v) : grid_(std::move(g)), values_(std::move(v)) {
    if (!grid_) throw Error(ErrorCode::BadInput, "radial function without grid");
    if (static_cast<int>(values_.size()) != grid_->n)
        throw Error(ErrorCode::BadInput, "value count does not match grid");
    for (double x : values_)
        if (!std::isfinite(x)) throw Error(ErrorCode::BadInput, "non-finite profile value");
}

bool RadialFunction::is_zero() const {
    for (double x : values_)
        if (x != 0.0) return false;
    return true;
}

RadialFunction sample(const GridPtr& g, const std::function<double(double)>& f) {
    std::vector<double> v(g->n);
    for (int i = 0; i < g->n; ++i) v[i] = f(g->r[i]);
    return RadialFunction(g, std::move(v));
}

std::vector<double> quadrature_weights(const RadialGrid& g, double k) {
    std::vector<double> w(g.n);
    for (int i = 0; i < g.n; ++i) w[i] = g.omega * g.ds * std::exp(k * g.s[i]);
    w.front() *= 0.5;
    w.back() *= 0.5;
    // [0, r_min] with u frozen at u(r_min); matters when k is small (k = 0 for the critical term at N = 3)
    if (k > 0.0) w.front() += g.omega * std::exp(k * g.s.front()) / k;
    return w;
}

double weighted_integral(const RadialFunction& u, double q, double w) {
    if (!(q >= 1.0)) throw Error(ErrorCode::BadInput, "exponent q must be >= 1");
    const auto& g = u.grid();
    double k = g.N - w * q;
    if (k <= 0.0) throw Error(ErrorCode::NonIntegrable, "r^{N-1-wq} not integrable at the origin");
    auto W = quadrature_weights(g, k);
    double sum = 0.0;
    for (int i = 0; i < g.n; ++i) sum += W[i] * std::pow(std::abs(u[i]), q);
    return sum;
}

double weighted_norm(const RadialFunction& u, double q, double w) {
    return std::pow(weighted_integral(u, q, w), 1.0 / q);
}

// interior: (u_{i-1} - 27 u_i + 27 u_{i+1} - u_{i+2}) / 24h, one-sided rows at the ends.
// A staggered stencil has no sawtooth null mode, unlike the centred one.
std::vector<double> midpoint_derivative(const RadialGrid& g, const std::vector<double>& u) {
    const int n = g.n;
    const double c = 1.0 / (24.0 * g.ds);
    std::vector<double> du(n - 1);
    du[0] = c * (-23.0 * u[0] + 21.0 * u[1] + 3.0 * u[2] - u[3]);
    for (int i = 1; i < n - 2; ++i) du[i] = c * (u[i - 1] - 27.0 * u[i] + 27.0 * u[i + 1] - u[i + 2]);
    du[n - 2] = c * (23.0 * u[n - 1] - 21.0 * u[n - 2] - 3.0 * u[n - 3] + u[n - 4]);
    return du;
}

std::vector<double> midpoint_derivative_transpose(const RadialGrid& g, const std::vector<double>& v) {
    const int n = g.n;
    const double c = 1.0 / (24.0 * g.ds);
    std::vector<double> out(n, 0.0);
    out[0] += c * -23.0 * v[0];
    out[1] += c * 21.0 * v[0];
    out[2] += c * 3.0 * v[0];
    out[3] += c * -1.0 * v[0];
    for (int i = 1; i < n - 2; ++i) {
        out[i - 1] += c * v[i];
        out[i] += c * -27.0 * v[i];
        out[i + 1] += c * 27.0 * v[i];
        out[i + 2] += c * -1.0 * v[i];
    }
    out[n - 1] += c * 23.0 * v[n - 2];
    out[n - 2] += c * -21.0 * v[n - 2];
    out[n - 3] += c * -3.0 * v[n - 2];
    out[n - 4] += c * 1.0 * v[n - 2];
    return out;
}

std::vector<double> dirichlet_weights(const RadialGrid& g, double a) {
    std::vector<double> w(g.n - 1);
    double k = g.N - 2.0 - 2.0 * a;
    for (int i = 0; i < g.n - 1; ++i) w[i] = g.omega * g.ds * std::exp(k * (g.s[i] + 0.5 * g.ds));
    return w;
}

double dirichlet_energy(const RadialFunction& u, double a) {
    const auto& g = u.grid();
    auto du = midpoint_derivative(g, u.values());
    auto w = dirichlet_weights(g, a);
    double sum = 0.0;
    for (std::size_t i = 0; i < du.size(); ++i) sum += w[i] * du[i] * du[i];
    return sum;
}

RadialFunction resample(const RadialFunction& u, double shift_s) {
    const auto& g = u.grid();
    const double half = 0.5 * (g.s_max - g.s_min);
    if (!(std::abs(shift_s) < half)) throw Error(ErrorCode::ShiftTooLarge, "shift exceeds half the window");
    const int n = g.n;
    std::vector<double> out(n);

    double k = shift_s / g.ds;
    long kr = std::lround(k);
    if (std::abs(k - kr) <= 1e-9) {
        for (int i = 0; i < n; ++i) {
            long j = i + kr;
            out[i] = j >= n ? 0.0 : (j < 0 ? u[0] : u[j]);
        }
        return RadialFunction(u.grid_ptr(), std::move(out));
    }

    boost::math::interpolators::cardinal_quintic_b_spline<double> spline(u.values().data(), u.values().size(),
                                                                       g.s_min, g.ds);
    for (int i = 0; i < n; ++i) {
        double x = g.s[i] + shift_s;
        if (x > g.s_max)
            out[i] = 0.0;
        else if (x < g.s_min)
            out[i] = u[0];
        else
            out[i] = spline(x);
    }
    return RadialFunction(u.grid_ptr(), std::move(out));
}

std::string to_csv(const RadialFunction& u) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "r,u\n";
    const auto& g = u.grid();
    for (int i = 0; i < g.n; ++i) os << g.r[i] << ',' << u[i] << '\n';
    return os.str();
}

void write_csv(const RadialFunction& u, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::BadInput, "cannot write " + path);
    f << to_csv(u);
}

RadialFunction read_csv(const std::string& path, int N) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::BadInput, "cannot read " + path);
    f.imbue(std::locale::classic());
    std::string line;
    std::getline(f, line);
    if (line.rfind("r,u", 0) != 0) throw Error(ErrorCode::BadInput, path + ": expected header r,u");
    std::vector<double> rs, us;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        is.imbue(std::locale::classic());
        double r, v;
        char comma;
        if (!(is >> r >> comma >> v) || comma != ',') throw Error(ErrorCode::BadInput, path + ": bad row " + line);
        rs.push_back(r);
        us.push_back(v);
    }
    if (rs.size() < 64) throw Error(ErrorCode::BadGridSpec, path + ": too few rows");
    double s0 = std::log(rs.front()), s1 = std::log(rs.back());
    auto g = make_grid(s0, s1, static_cast<int>(rs.size()), N);
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (std::abs(std::log(rs[i]) - g->s[i]) > 1e-9 * std::max(1.0, std::abs(g->s[i])))
            throw Error(ErrorCode::BadGridSpec, path + ": radii are not uniform in log r");
    return RadialFunction(g, std::move(us));
}

} // namespace ckn
