#include "ampr/weighted_lasso.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "ampr/errors.hpp"

namespace ampr {

namespace {

// Active-set passes between Newton steps on the current sign pattern. Plain
// cyclic descent converges slowly when the active columns are nearly
// collinear (small lambda, few distinct resampled rows).
constexpr int kOrthantEvery = 10;
// Cold-start continuation: penalty ratio per stage and stage tolerance.
constexpr double kContinuationFactor = 2.0;
constexpr double kContinuationTol = 1e-6;
// A blocked step drops one coordinate; retry on the reduced pattern.
constexpr int kOrthantRepeats = 8;

// Rows with c_mu > 0, scaled by sqrt(c_mu) so the loss is 1/2 |y~ - X~ beta|^2.
struct ScaledRows {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

ScaledRows scale_rows(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& weights) {
    std::vector<Eigen::Index> kept;
    kept.reserve(weights.size());
    for (Eigen::Index mu = 0; mu < weights.size(); ++mu) {
        if (weights[mu] > 0.0) kept.push_back(mu);
    }
    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::VectorXd scale(m);
    ScaledRows out;
    out.X.resize(m, X.cols());
    out.y.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        scale[k] = std::sqrt(weights[kept[k]]);
        out.y[k] = scale[k] * y[kept[k]];
    }
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
        for (Eigen::Index k = 0; k < m; ++k) out.X(k, i) = scale[k] * X(kept[k], i);
    }
    return out;
}

[[maybe_unused]] double objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& beta,
                                  const Eigen::VectorXd& penalties) {
    return 0.5 * residual.squaredNorm() + penalties.dot(beta.cwiseAbs());
}

class CoordinateDescent {
public:
    CoordinateDescent(const ScaledRows& rows, const Eigen::VectorXd& penalties)
        : rows_(rows), penalties_(penalties), curvature_(rows.X.colwise().squaredNorm()) {}

    // One cyclic pass over `coords`; returns the largest coordinate change.
    double pass(Eigen::VectorXd& beta, Eigen::VectorXd& residual,
                const std::vector<Eigen::Index>& coords) const {
        double max_delta = 0.0;
        for (Eigen::Index j : coords) {
            const double d = curvature_[j];
            if (d == 0.0) continue;
            const double old = beta[j];
            const double z = rows_.X.col(j).dot(residual) + d * old;
            const double lam = penalties_[j];
            double updated = 0.0;
            if (z > lam) {
                updated = (z - lam) / d;
            } else if (z < -lam) {
                updated = (z + lam) / d;
            }
            const double delta = updated - old;
            if (delta != 0.0) {
                residual.noalias() -= delta * rows_.X.col(j);
                beta[j] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        return max_delta;
    }

    // Newton step on the current sign pattern: minimize the quadratic restricted
    // to the orthant of the active coordinates, stopping at the first sign
    // change. The objective is convex on that segment, so this never ascends.
    // Returns true when the full step was taken (no coordinate hit zero).
    bool orthant_step(Eigen::VectorXd& beta, Eigen::VectorXd& residual) const {
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < beta.size(); ++j) {
            if (beta[j] != 0.0) active.push_back(j);
        }
        const auto k = static_cast<Eigen::Index>(active.size());
        if (k == 0) return false;

        Eigen::MatrixXd xa(rows_.X.rows(), k);
        Eigen::VectorXd sign(k), current(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            xa.col(a) = rows_.X.col(active[a]);
            current[a] = beta[active[a]];
            sign[a] = current[a] > 0.0 ? 1.0 : -1.0;
        }
        if (k > rows_.X.rows()) return null_step(beta, residual, active, xa, sign, current);

        Eigen::MatrixXd gram(k, k);
        gram.setZero();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(xa.transpose());
        Eigen::VectorXd rhs = xa.transpose() * rows_.y;
        for (Eigen::Index a = 0; a < k; ++a) rhs[a] -= penalties_[active[a]] * sign[a];

        const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
        if (llt.info() != Eigen::Success) return null_step(beta, residual, active, xa, sign, current);
        const Eigen::VectorXd target = llt.solve(rhs);
        if (!target.allFinite()) return false;

        // Largest step in [0, 1] keeping every active coordinate in its orthant.
        double step = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index a = 0; a < k; ++a) {
            if (target[a] * sign[a] < 0.0) {
                const double t = current[a] / (current[a] - target[a]);
                if (t < step) {
                    step = t;
                    blocking = a;
                }
            }
        }
        const Eigen::VectorXd next = current + step * (target - current);
        for (Eigen::Index a = 0; a < k; ++a) {
            beta[active[a]] = (a == blocking || next[a] * sign[a] <= 0.0) ? 0.0 : next[a];
        }
        residual = rows_.y - rows_.X * beta;
        return blocking < 0;
    }

    const Eigen::VectorXd& curvature() const { return curvature_; }

private:
    // Singular active columns: the fit is constant along null(X_A), so move
    // along the projection of -lambda*sign onto it (or any null direction when
    // that vanishes) until a coordinate reaches zero. Returns false: the
    // pattern always shrinks by one.
    bool null_step(Eigen::VectorXd& beta, Eigen::VectorXd& residual,
                   const std::vector<Eigen::Index>& active, const Eigen::MatrixXd& xa,
                   const Eigen::VectorXd& sign, const Eigen::VectorXd& current) const {
        const auto k = static_cast<Eigen::Index>(active.size());
        // The trailing columns of Q in a pivoted QR of X_A^T span null(X_A).
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xa.transpose());
        const Eigen::Index rank = qr.rank();
        if (rank >= k) return false;
        const Eigen::MatrixXd q = qr.householderQ();
        const auto null = q.rightCols(k - rank);

        Eigen::VectorXd slope(k);
        for (Eigen::Index a = 0; a < k; ++a) slope[a] = penalties_[active[a]] * sign[a];
        Eigen::VectorXd dir = -(null * (null.transpose() * slope));
        if (dir.norm() <= 1e-12 * std::max(1.0, slope.norm())) dir = null.col(0);

        double step = std::numeric_limits<double>::infinity();
        Eigen::Index blocking = -1;
        for (Eigen::Index a = 0; a < k; ++a) {
            if (current[a] * dir[a] < 0.0) {
                const double t = -current[a] / dir[a];
                if (t < step) {
                    step = t;
                    blocking = a;
                }
            }
        }
        if (blocking < 0) {
            // Flat direction with no sign change ahead: walk the other way.
            dir = -dir;
            for (Eigen::Index a = 0; a < k; ++a) {
                if (current[a] * dir[a] < 0.0) {
                    const double t = -current[a] / dir[a];
                    if (t < step) {
                        step = t;
                        blocking = a;
                    }
                }
            }
            if (blocking < 0) return false;
        }
        const Eigen::VectorXd next = current + step * dir;
        for (Eigen::Index a = 0; a < k; ++a) {
            beta[active[a]] = (a == blocking || next[a] * sign[a] <= 0.0) ? 0.0 : next[a];
        }
        residual = rows_.y - rows_.X * beta;
        return false;
    }

    const ScaledRows& rows_;
    const Eigen::VectorXd& penalties_;
    Eigen::VectorXd curvature_;
};

}  // namespace

void WeightedLassoProblem::validate() const {
    if (y.size() != X.rows()) throw DimensionError("weighted lasso: y length differs from rows of X");
    if (weights.size() != X.rows()) {
        throw DimensionError("weighted lasso: weight length differs from rows of X");
    }
    if (penalties.size() != X.cols()) {
        throw DimensionError("weighted lasso: penalty length differs from columns of X");
    }
    if ((weights.array() < 0.0).any() || !weights.allFinite()) {
        throw DomainError("weighted lasso: weights must be finite and >= 0");
    }
    if (!(weights.array() > 0.0).any()) throw DomainError("weighted lasso: all weights are zero");
    if ((penalties.array() < 0.0).any() || penalties.hasNaN()) {
        throw DomainError("weighted lasso: penalties must be >= 0");
    }
}

namespace {

LassoSolution descend(const WeightedLassoProblem& problem, const ScaledRows& rows,
                      const Eigen::VectorXd& penalties, const LassoOptions& options,
                      Eigen::VectorXd start) {
    const Eigen::Index n = problem.X.cols();
    const CoordinateDescent cd(rows, penalties);

    LassoSolution sol;
    sol.beta = std::move(start);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (cd.curvature()[j] == 0.0) {
            sol.beta[j] = 0.0;
            sol.flagged.push_back(static_cast<int>(j));
        }
    }
    Eigen::VectorXd residual = rows.y - rows.X * sol.beta;

    std::vector<Eigen::Index> all(n);
    for (Eigen::Index j = 0; j < n; ++j) all[j] = j;
    std::vector<Eigen::Index> active;

#ifndef NDEBUG
    double last_objective = objective(residual, sol.beta, penalties);
    auto check_descent = [&] {
        const double now = objective(residual, sol.beta, penalties);
        assert(now <= last_objective + 1e-12 * std::max(1.0, std::abs(last_objective)));
        last_objective = now;
    };
#else
    auto check_descent = [] {};
#endif

    while (sol.iters < options.max_iters) {
        const double full_delta = cd.pass(sol.beta, residual, all);
        ++sol.iters;
        check_descent();
        if (full_delta <= options.tol) {
            sol.converged = true;
            break;
        }
        active.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (sol.beta[j] != 0.0) active.push_back(j);
        }
        int active_passes = 0;
        while (sol.iters < options.max_iters) {
            const double delta = cd.pass(sol.beta, residual, active);
            ++sol.iters;
            check_descent();
            if (delta <= options.tol) break;
            if (++active_passes % kOrthantEvery == 0) {
                for (int r = 0; r < kOrthantRepeats; ++r) {
                    const bool full = cd.orthant_step(sol.beta, residual);
                    check_descent();
                    if (full) break;
                }
            }
        }
    }
    return sol;
}

}  // namespace

LassoSolution fit_weighted_lasso(const WeightedLassoProblem& problem, const LassoOptions& options,
                                 const Eigen::VectorXd* warm_start) {
    problem.validate();
    if (!(options.tol > 0.0) || options.max_iters < 1) {
        throw ConfigError("weighted lasso: tol must be > 0 and max_iters >= 1");
    }
    const Eigen::Index n = problem.X.cols();
    if (warm_start && warm_start->size() != n) {
        throw DimensionError("weighted lasso: warm start length differs from columns of X");
    }
    const ScaledRows rows = scale_rows(problem.X, problem.y, problem.weights);

    Eigen::VectorXd start = warm_start ? *warm_start : Eigen::VectorXd::Zero(n);
    int spent = 0;
    if (!warm_start && problem.penalties.size() > 0) {
        // Cold starts at small penalties walk down from the null solution:
        // the first sweep from zero would otherwise activate nearly every
        // column and leave a long pruning phase.
        const Eigen::VectorXd grad = (rows.X.transpose() * rows.y).cwiseAbs();
        double ratio = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (problem.penalties[j] > 0.0) ratio = std::max(ratio, grad[j] / problem.penalties[j]);
        }
        LassoOptions stage = options;
        stage.tol = std::max(options.tol, kContinuationTol);
        for (double scale = ratio / kContinuationFactor; scale > 1.0; scale /= kContinuationFactor) {
            auto partial = descend(problem, rows, scale * problem.penalties, stage, start);
            spent += partial.iters;
            start = std::move(partial.beta);
            stage.max_iters = std::max(1, options.max_iters - spent);
        }
    }
    LassoOptions last = options;
    last.max_iters = std::max(1, options.max_iters - spent);
    LassoSolution sol = descend(problem, rows, problem.penalties, last, std::move(start));
    sol.iters += spent;
    sol.kkt_violation = kkt_residual(problem, sol.beta);
    return sol;
}

double kkt_residual(const WeightedLassoProblem& problem, const Eigen::VectorXd& beta) {
    if (beta.size() != problem.X.cols()) throw DimensionError("kkt_residual: beta length mismatch");
    const Eigen::VectorXd weighted_residual =
        problem.weights.cwiseProduct(problem.y - problem.X * beta);
    const Eigen::VectorXd grad = -(problem.X.transpose() * weighted_residual);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        const double lam = problem.penalties[i];
        double violation = 0.0;
        if (beta[i] == 0.0) {
            violation = std::max(0.0, std::abs(grad[i]) - lam);
        } else {
            violation = std::abs(grad[i] + lam * (beta[i] > 0.0 ? 1.0 : -1.0));
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd* weights) {
    if (y.size() != X.rows()) throw DimensionError("lambda_max: y length differs from rows of X");
    if (weights) {
        return (X.transpose() * weights->cwiseProduct(y)).cwiseAbs().maxCoeff();
    }
    return (X.transpose() * y).cwiseAbs().maxCoeff();
}

std::vector<LassoSolution> fit_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& weights,
                                    const std::vector<double>& lambda_grid,
                                    const LassoOptions& options,
                                    const Eigen::VectorXd* penalty_shape) {
    for (std::size_t k = 1; k < lambda_grid.size(); ++k) {
        if (!(lambda_grid[k] < lambda_grid[k - 1])) {
            throw ConfigError("fit_path: lambda grid must be strictly decreasing");
        }
    }
    const Eigen::VectorXd shape =
        penalty_shape ? *penalty_shape : Eigen::VectorXd::Ones(X.cols());
    if (shape.size() != X.cols()) throw DimensionError("fit_path: penalty shape length mismatch");

    std::vector<LassoSolution> path;
    path.reserve(lambda_grid.size());
    const Eigen::VectorXd* warm = nullptr;
    for (double lam : lambda_grid) {
        WeightedLassoProblem problem{X, y, weights, lam * shape};
        path.push_back(fit_weighted_lasso(problem, options, warm));
        warm = &path.back().beta;
    }
    return path;
}

}  // namespace ampr
