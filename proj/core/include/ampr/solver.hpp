#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ampr/data.hpp"
#include "ampr/moments.hpp"

namespace ampr {

/// How the resample counts c_mu are averaged inside the message passing.
enum class CountLaw {
    Poisson,        ///< c ~ Poisson(tau)
    Deterministic,  ///< c = 1: f1 = 1/(1+chi), f2 = f1^2 (plain AMP for Lasso)
};

struct AmprConfig {
    double tau = 1.0;
    PenaltyMixture penalty = PenaltyMixture::fixed(1.0);
    double damping = 1.0;   ///< in (0, 1]; 1 is the undamped update
    int max_iters = 1000;
    double conv_tol = 1e-8;
    double tail_tol = kDefaultTailTol;
    CountLaw counts = CountLaw::Poisson;

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

/// Initial (beta_bar, chi, W), e.g. the converged state at a neighbouring lambda.
struct WarmStart {
    Eigen::VectorXd beta_bar;
    Eigen::VectorXd chi;
    Eigen::VectorXd w_var;
};

/**
 * Iterate of the message passing. Per-feature quantities have length N,
 * per-sample ones length M. After init_state() and every sweep the sample
 * block (chi_mu, w_mu, f1, f2, a) is consistent with the feature block.
 */
struct AmprState {
    Eigen::VectorXd beta_bar;  ///< resampling mean of the estimator
    Eigen::VectorXd chi;       ///< intra-sample (rescaled) variance
    Eigen::VectorXd w_var;     ///< inter-sample variance
    Eigen::VectorXd a;         ///< Onsager-corrected residual
    Eigen::VectorXd chi_mu;
    Eigen::VectorXd w_mu;
    Eigen::VectorXd A;
    Eigen::VectorXd B;
    Eigen::VectorXd C;
    Eigen::VectorXd f1;
    Eigen::VectorXd f2;
    int iter = 0;
};

struct AmprOutput {
    AmprState state;
    Eigen::VectorXd pi;  ///< positive probabilities
    bool converged = false;
    int iters_used = 0;
    std::vector<double> residual_history;  ///< max |delta beta_bar| per sweep
    double damping = 1.0;                  ///< damping the run used
};

struct Macroscopics {
    double chi_tilde = 0.0;
    double w_tilde = 0.0;
    std::optional<double> mse;
};

/**
 * Message passing with resampling for the Lasso. Holds a reference to the
 * design (which must outlive the solver) and a cache of its squared entries.
 * One solver object is used from one thread at a time.
 */
class AmprSolver {
public:
    AmprSolver(const Dataset& data, AmprConfig config);

    const AmprConfig& config() const noexcept { return config_; }
    /// Replaces the penalty law, e.g. while walking down a lambda grid.
    void set_penalty(const PenaltyMixture& penalty) { config_.penalty = penalty; }

    /**
     * Cold start sets beta_bar = chi = W = 0; a warm start copies the given
     * triple. a is evaluated with the previous residual taken as zero.
     */
    AmprState init_state(const std::optional<WarmStart>& warm = std::nullopt) const;

    /**
     * One damped sweep. Returns max |delta beta_bar|. Throws DivergenceError
     * carrying the sweep index when a non-finite value appears.
     */
    double sweep(AmprState& state) const;

    /**
     * Sweeps until max |delta beta_bar| <= conv_tol and the changes of chi and
     * W are within conv_tol relative to max(1, |value|), or until max_iters;
     * then evaluates pi.
     */
    AmprOutput run(const std::optional<WarmStart>& warm = std::nullopt) const;

private:
    void refresh_sample_block(AmprState& state, const Eigen::VectorXd* a_prev) const;

    const Dataset& data_;
    AmprConfig config_;
    Eigen::MatrixXd x_squared_;
};

/**
 * Cold-start runs with the damping halved after each divergence or run that
 * hits max_iters, until one converges or the next damping would drop below
 * min_damping. The last attempt's result (or DivergenceError) is returned.
 * Throws ConfigError unless 0 < min_damping <= config.damping.
 */
AmprOutput run_with_damping_backoff(const Dataset& data, AmprConfig config, double min_damping);

/// One sweep on a fresh copy; convenience for tests and scripting.
AmprState ampr_sweep(const AmprState& state, const Dataset& data, const AmprConfig& config);

/// Pi_i = [P(|B_i + sqrt(C_i) z| > lambda)]_lambda.
Eigen::VectorXd positive_probability(const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                                     const Eigen::VectorXd& C, const PenaltyMixture& mix);

/**
 * P(beta_i <= t) on a sorted grid for beta_i = S_lambda(B_i + sqrt(C_i) z; A_i)
 * with lambda drawn from the mixture. The law has an atom of mass 1 - Pi_i
 * at 0; values are right-continuous. Throws ConfigError on an unsorted grid.
 */
std::vector<double> marginal_cdf(int i, const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                                 const Eigen::VectorXd& C, const PenaltyMixture& mix,
                                 const std::vector<double>& grid);

/// Means of chi and W, and the MSE against beta0 when supplied.
Macroscopics macroscopics(const AmprState& state, const Eigen::VectorXd* beta0 = nullptr);

}  // namespace ampr
