#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace ampr {

/// min_beta 1/2 sum_mu c_mu (y_mu - x_mu . beta)^2 + sum_i lambda_i |beta_i|
struct WeightedLassoProblem {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    Eigen::VectorXd weights;    ///< c, length M, nonnegative
    Eigen::VectorXd penalties;  ///< lambda_i, length N, nonnegative

    /// Throws DimensionError / DomainError when the invariants fail.
    void validate() const;
};

struct LassoOptions {
    double tol = 1e-10;       ///< max coordinate change at convergence
    int max_iters = 100000;   ///< cap on full plus active-set sweeps
};

struct LassoSolution {
    Eigen::VectorXd beta;
    int iters = 0;
    double kkt_violation = 0.0;
    bool converged = false;
    /// Columns with zero weighted curvature but nonzero gradient, left at 0.
    std::vector<int> flagged;
};

/**
 * Cyclic coordinate descent with active-set iteration: sweep the active set
 * until its largest change is <= tol, then a full pass; stop when a full
 * pass changes no coordinate by more than tol.
 */
LassoSolution fit_weighted_lasso(const WeightedLassoProblem& problem,
                                 const LassoOptions& options = {},
                                 const Eigen::VectorXd* warm_start = nullptr);

/// Largest violation of the subgradient optimality conditions at beta.
double kkt_residual(const WeightedLassoProblem& problem, const Eigen::VectorXd& beta);

/// max_i |sum_mu c_mu x_{mu i} y_mu|: the smallest uniform penalty with solution 0.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd* weights = nullptr);

/**
 * Warm-started path over a strictly decreasing grid of scales s: the penalty
 * vector at step k is s_k * penalty_shape (all ones when penalty_shape is
 * null). Throws ConfigError if the grid is not strictly decreasing.
 */
std::vector<LassoSolution> fit_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& weights,
                                    const std::vector<double>& lambda_grid,
                                    const LassoOptions& options = {},
                                    const Eigen::VectorXd* penalty_shape = nullptr);

}  // namespace ampr
