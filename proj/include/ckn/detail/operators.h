#pragma once

#include "ckn/grid.h"

#include <Eigen/Sparse>

#include <vector>

namespace ckn::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// D^T W_A D, the Hessian of the discrete Dirichlet energy over two
SpMat stiffness(const RadialGrid& g, double a);

inline Vec to_eigen(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), v.size()); }
inline std::vector<double> from_eigen(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

} // namespace ckn::detail
