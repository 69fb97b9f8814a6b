#include "ampr/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "ampr/errors.hpp"

namespace ampr {

void AmprConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("ampr: tau must be finite and > 0");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("ampr: damping must lie in (0, 1]");
    if (max_iters < 1) throw ConfigError("ampr: max_iters must be >= 1");
    if (!(conv_tol > 0.0)) throw ConfigError("ampr: conv_tol must be > 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("ampr: tail_tol must lie in (0, 1)");
}

AmprSolver::AmprSolver(const Dataset& data, AmprConfig config)
    : data_(data), config_(std::move(config)) {
    config_.validate();
    if (data_.y.size() != data_.X.rows()) {
        throw DimensionError("ampr: y length differs from rows of X");
    }
    if (!data_.X.allFinite() || !data_.y.allFinite()) {
        throw DomainError("ampr: dataset contains non-finite values");
    }
    x_squared_ = data_.X.array().square().matrix();
}

void AmprSolver::refresh_sample_block(AmprState& state, const Eigen::VectorXd* a_prev) const {
    const Eigen::Index m = data_.X.rows();
    state.chi_mu.noalias() = x_squared_ * state.chi;
    state.w_mu.noalias() = x_squared_ * state.w_var;
    state.f1.resize(m);
    state.f2.resize(m);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        const double chi_mu = std::max(state.chi_mu[mu], 0.0);
        if (config_.counts == CountLaw::Deterministic) {
            state.f1[mu] = 1.0 / (1.0 + chi_mu);
            state.f2[mu] = state.f1[mu] * state.f1[mu];
        } else {
            const auto f = poisson_averages(chi_mu, config_.tau, config_.tail_tol);
            state.f1[mu] = f.f1;
            state.f2[mu] = f.f2;
        }
    }
    Eigen::VectorXd field = data_.y - data_.X * state.beta_bar;
    if (a_prev) field.array() += state.chi_mu.array() * a_prev->array();
    state.a = state.f1.cwiseProduct(field);
}

AmprState AmprSolver::init_state(const std::optional<WarmStart>& warm) const {
    const Eigen::Index n = data_.X.cols();
    AmprState state;
    if (warm) {
        if (warm->beta_bar.size() != n || warm->chi.size() != n || warm->w_var.size() != n) {
            throw DimensionError("ampr: warm start length differs from columns of X");
        }
        state.beta_bar = warm->beta_bar;
        state.chi = warm->chi.cwiseMax(0.0);
        state.w_var = warm->w_var.cwiseMax(0.0);
    } else {
        state.beta_bar = Eigen::VectorXd::Zero(n);
        state.chi = Eigen::VectorXd::Zero(n);
        state.w_var = Eigen::VectorXd::Zero(n);
    }
    state.A = Eigen::VectorXd::Zero(n);
    state.B = Eigen::VectorXd::Zero(n);
    state.C = Eigen::VectorXd::Zero(n);
    refresh_sample_block(state, nullptr);
    return state;
}

double AmprSolver::sweep(AmprState& state) const {
    const Eigen::Index n = data_.X.cols();
    const int index = state.iter + 1;
    assert((state.f1.array() > 0.0).all());

    // Feature-side coefficients from the sample block at the current step.
    Eigen::MatrixXd sample_terms(data_.X.rows(), 2);
    sample_terms.col(0) = state.f1;
    const Eigen::ArrayXd ratio = state.a.array() / state.f1.array();
    sample_terms.col(1) = (state.f2.array() * state.w_mu.array() +
                           (state.f2.array() - state.f1.array().square()) * ratio.square())
                              .matrix();
    const Eigen::MatrixXd feature_terms = x_squared_.transpose() * sample_terms;
    state.A = feature_terms.col(0);
    state.C = feature_terms.col(1).cwiseMax(0.0);
    state.B.noalias() = data_.X.transpose() * state.a;
    state.B.array() += state.A.array() * state.beta_bar.array();

    const double keep = 1.0 - config_.damping;
    const double step = config_.damping;
    double max_delta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double beta = 0.0;
        double chi = 0.0;
        double w = 0.0;
        if (state.A[i] > 0.0) {
            const auto m = averaged_soft_moments(state.B[i], state.C[i], config_.penalty, state.A[i]);
            beta = m.m1;
            chi = m.mass / state.A[i];
            w = std::max(m.m2 - m.m1 * m.m1, 0.0);
        }
        if (!std::isfinite(beta) || !std::isfinite(chi) || !std::isfinite(w)) {
            throw DivergenceError("ampr: non-finite coefficient update", index);
        }
        const double damped = keep * state.beta_bar[i] + step * beta;
        max_delta = std::max(max_delta, std::abs(damped - state.beta_bar[i]));
        state.beta_bar[i] = damped;
        state.chi[i] = std::max(keep * state.chi[i] + step * chi, 0.0);
        state.w_var[i] = std::max(keep * state.w_var[i] + step * w, 0.0);
    }

    const Eigen::VectorXd a_prev = state.a;
    refresh_sample_block(state, &a_prev);
    if (!state.a.allFinite()) {
        throw DivergenceError("ampr: non-finite residual update", index);
    }
    state.iter = index;
    return max_delta;
}

AmprOutput AmprSolver::run(const std::optional<WarmStart>& warm) const {
    AmprOutput out;
    out.state = init_state(warm);
    const auto settled = [&](const Eigen::VectorXd& before, const Eigen::VectorXd& after) {
        for (Eigen::Index i = 0; i < after.size(); ++i) {
            if (std::abs(after[i] - before[i]) > config_.conv_tol * std::max(1.0, std::abs(after[i]))) return false;
        }
        return true;
    };
    Eigen::VectorXd chi_before, w_before;
    while (out.iters_used < config_.max_iters) {
        chi_before = out.state.chi;
        w_before = out.state.w_var;
        const double delta = sweep(out.state);
        ++out.iters_used;
        out.residual_history.push_back(delta);
        if (delta <= config_.conv_tol && settled(chi_before, out.state.chi) &&
            settled(w_before, out.state.w_var)) {
            out.converged = true;
            break;
        }
    }
    out.pi = positive_probability(out.state.A, out.state.B, out.state.C, config_.penalty);
    out.damping = config_.damping;
    return out;
}

AmprOutput run_with_damping_backoff(const Dataset& data, AmprConfig config, double min_damping) {
    config.validate();
    if (!(min_damping > 0.0) || min_damping > config.damping) {
        throw ConfigError("damping backoff: min_damping must lie in (0, damping]");
    }
    while (true) {
        const bool last = config.damping / 2.0 < min_damping;
        try {
            auto out = AmprSolver(data, config).run();
            if (out.converged || last) return out;
        } catch (const DivergenceError&) {
            if (last) throw;
        }
        config.damping /= 2.0;
    }
}

AmprState ampr_sweep(const AmprState& state, const Dataset& data, const AmprConfig& config) {
    const AmprSolver solver(data, config);
    AmprState next = state;
    solver.sweep(next);
    return next;
}

Eigen::VectorXd positive_probability(const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                                     const Eigen::VectorXd& C, const PenaltyMixture& mix) {
    if (A.size() != B.size() || A.size() != C.size()) {
        throw DimensionError("positive_probability: coefficient lengths differ");
    }
    Eigen::VectorXd pi(A.size());
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        if (!(A[i] > 0.0)) {
            pi[i] = 0.0;
            continue;
        }
        const double c = std::max(C[i], 0.0);
        pi[i] = penalty_average(
            mix, [&](double lam) { return gauss_soft_moments(B[i], c, lam, A[i]).mass; });
        pi[i] = std::clamp(pi[i], 0.0, 1.0);
    }
    return pi;
}

std::vector<double> marginal_cdf(int i, const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                                 const Eigen::VectorXd& C, const PenaltyMixture& mix,
                                 const std::vector<double>& grid) {
    if (i < 0 || i >= A.size() || B.size() != A.size() || C.size() != A.size()) {
        throw DimensionError("marginal_cdf: index or coefficient lengths out of range");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw ConfigError("marginal_cdf: grid must be sorted");
    }
    const double a = A[i];
    const double b = B[i];
    const double c = std::max(C[i], 0.0);
    if (!(a > 0.0)) throw DomainError("marginal_cdf: A_i must be > 0");
    const double sd = std::sqrt(c);

    // P(S_lam(b + sd z; a) <= t) for a single penalty value.
    auto cdf_at = [&](double t, double lam) {
        if (c == 0.0) return soft_threshold(b, lam, a) <= t ? 1.0 : 0.0;
        const double edge = t < 0.0 ? a * t - lam : a * t + lam;
        return normal_cdf((edge - b) / sd);
    };

    std::vector<double> out;
    out.reserve(grid.size());
    for (double t : grid) {
        if (t == std::numeric_limits<double>::infinity()) {
            out.push_back(1.0);
        } else if (t == -std::numeric_limits<double>::infinity()) {
            out.push_back(0.0);
        } else {
            out.push_back(penalty_average(mix, [&](double lam) { return cdf_at(t, lam); }));
        }
    }
    return out;
}

Macroscopics macroscopics(const AmprState& state, const Eigen::VectorXd* beta0) {
    Macroscopics out;
    const auto n = static_cast<double>(state.beta_bar.size());
    if (n == 0) return out;
    out.chi_tilde = state.chi.sum() / n;
    out.w_tilde = state.w_var.sum() / n;
    if (beta0) {
        if (beta0->size() != state.beta_bar.size()) {
            throw DimensionError("macroscopics: beta0 length differs from beta_bar");
        }
        out.mse = (*beta0 - state.beta_bar).squaredNorm() / n;
    }
    return out;
}

}  // namespace ampr
