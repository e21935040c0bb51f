#include "ckn/detail/operators.h"

namespace ckn::detail {

SpMat stiffness(const RadialGrid& g, double a) {
    const int n = g.n;
    const double c = 1.0 / (24.0 * g.ds);
    auto w = dirichlet_weights(g, a);
    SpMat D(n - 1, n);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(4 * (n - 1));
    const double e0[4] = {-23.0, 21.0, 3.0, -1.0};
    for (int j = 0; j < 4; ++j) {
        t.emplace_back(0, j, c * e0[j]);
        t.emplace_back(n - 2, n - 1 - j, -c * e0[j]);
    }
    const double in[4] = {1.0, -27.0, 27.0, -1.0};
    for (int i = 1; i < n - 2; ++i)
        for (int j = 0; j < 4; ++j) t.emplace_back(i, i - 1 + j, c * in[j]);
    D.setFromTriplets(t.begin(), t.end());
    SpMat W(n - 1, n - 1);
    W.reserve(Eigen::VectorXi::Constant(n - 1, 1));
    for (int i = 0; i < n - 1; ++i) W.insert(i, i) = w[i];
    SpMat K = SpMat(D.transpose()) * W * D;
    K.makeCompressed();
    return K;
}

} // namespace ckn::detail
