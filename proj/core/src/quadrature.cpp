#include "ampr/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ampr/errors.hpp"

namespace ampr {

QuadratureRule gauss_hermite_normal(int order) {
    if (order < 1) {
        throw ConfigError("gauss_hermite_normal: order must be >= 1");
    }
    // Jacobi matrix of He_n: zero diagonal, sqrt(k) on the off-diagonals.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(std::max(order - 1, 0));
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    double total = 0.0;
    for (int k = 0; k < order; ++k) {
        rule.nodes[k] = eig.eigenvalues()[k];
        const double v0 = eig.eigenvectors()(0, k);
        rule.weights[k] = v0 * v0;
        total += rule.weights[k];
    }
    for (double& w : rule.weights) w /= total;
    // Symmetrize to remove eigen-solver round-off.
    for (int k = 0; k < order / 2; ++k) {
        const int j = order - 1 - k;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[k]);
        const double w = 0.5 * (rule.weights[j] + rule.weights[k]);
        rule.nodes[k] = -x;
        rule.nodes[j] = x;
        rule.weights[k] = rule.weights[j] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

}  // namespace ampr
