#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ampr/data.hpp"
#include "ampr/resampling.hpp"
#include "ampr/solver.hpp"

namespace ampr {

enum class Engine { Ampr, MonteCarlo };

std::string to_string(Engine engine);
/// Accepts "ampr" and "monte-carlo" (also "mc"); throws ConfigError otherwise.
Engine parse_engine(const std::string& name);

/// Resampling and engine settings shared by Bolasso and stability selection.
struct SelectionConfig {
    double tau = 0.5;
    double w = 0.5;
    double p_w = 0.5;
    Engine engine = Engine::Ampr;
    // AMPR engine
    double damping = 1.0;
    int max_iters = 2000;
    double conv_tol = 1e-8;
    // Monte-Carlo engine
    int n_res = 1000;
    std::uint64_t seed = 0;
    CountMode count_mode = CountMode::FixedSize;
    LassoOptions lasso{};
    unsigned workers = 0;

    /// Damping used on correlated designs when none is given explicitly.
    static constexpr double kCorrelatedDamping = 0.05;

    static SelectionConfig bolasso_defaults() {
        SelectionConfig c;
        c.tau = 1.0;
        c.w = 1.0;
        c.p_w = 0.0;
        return c;
    }
    static SelectionConfig stability_defaults() { return {}; }

    AmprConfig ampr_config(double lambda) const;
    ResamplingConfig resampling_config(double lambda) const;
};

struct StabilityPath {
    std::vector<double> lambdas;  ///< strictly decreasing
    Eigen::MatrixXd pi;           ///< grid x N
    Eigen::MatrixXd beta_bar;     ///< grid x N
    Eigen::MatrixXd w_var;        ///< grid x N
    Engine engine = Engine::Ampr;
    std::vector<bool> converged;  ///< per grid point
    std::vector<int> iterations;  ///< AMPR sweeps per grid point (0 for Monte-Carlo)
};

struct RejectionRegion {
    std::vector<double> lambdas;
    std::vector<double> median;
    std::vector<double> lower;
    std::vector<double> upper;
    double q_lo = 16.0;
    double q_hi = 84.0;
    int n_noise = 0;
    bool few_noise_columns = false;  ///< fewer than 20 noise columns were available

    /// True when value lies within [lower, upper] at grid point k.
    bool contains(std::size_t k, double value) const {
        return value >= lower[k] && value <= upper[k];
    }
};

struct CvResult {
    std::vector<double> lambdas;
    std::vector<double> mean_error;
    std::vector<double> standard_error;
    std::size_t index_min = 0;
    std::size_t index_opt = 0;
    double lambda_min = 0.0;
    double lambda_opt = 0.0;
    /// Full-data Lasso solution at lambda_opt.
    Eigen::VectorXd beta_opt;
    std::vector<int> support_opt;
};

struct TpFp {
    std::optional<double> tp;  ///< undefined for an empty true support
    double fp = 0.0;
};

struct SelectionReport {
    std::vector<int> support;
    double threshold = 0.9;
    double lambda = 0.0;
    Eigen::VectorXd pi;
    std::optional<TpFp> rates;  ///< present when the dataset carries a truth
};

/// lambda = sqrt(alpha) / 2, the scaling that keeps Bolasso consistent.
double bolasso_lambda(double alpha);

/**
 * Positive probabilities by the configured engine at one lambda, then
 * S = {i : pi_i >= threshold}. Throws NonConvergenceError (no partial
 * result) when the AMPR engine hits its iteration cap.
 */
SelectionReport bolasso(const Dataset& data, double lambda, double threshold,
                        const SelectionConfig& config);

/// 50 log-spaced values from max_i |x_i . y| down to that value / 1000.
std::vector<double> default_lambda_grid(const Dataset& data, int points = 50,
                                        double min_ratio = 1e-3);

/**
 * Stability path over a strictly decreasing grid. AMPR walks the grid with
 * warm starts; Monte-Carlo reuses each resample's draw along the grid. A
 * point whose AMPR run diverges is flagged and left as NaN.
 */
StabilityPath stability_path(const Dataset& data, const std::vector<double>& lambdas,
                             const SelectionConfig& config);

/// Linear interpolation between order statistics (inclusive definition), q in [0, 100].
double percentile(std::vector<double> values, double q);

/**
 * Pointwise-in-lambda median and q_lo / q_hi percentiles of the noise
 * columns' pi. Throws ConfigError when the mask selects no column.
 */
RejectionRegion rejection_region(const StabilityPath& path, const std::vector<bool>& noise_mask,
                                 double q_lo = 16.0, double q_hi = 84.0);

/// Fold of each row: a seeded permutation dealt round-robin into k folds.
std::vector<int> make_folds(int n_samples, int k, std::uint64_t seed);

/**
 * k-fold CV of the plain Lasso on a decreasing grid. Error is the mean
 * squared prediction error on held-out rows; SE is the fold standard
 * deviation over sqrt(k); lambda_opt is the largest lambda within one SE of
 * the minimum. Throws ConfigError when k < 2 or k > M.
 */
CvResult cross_validate(const Dataset& data, const std::vector<double>& lambdas, int k,
                        std::uint64_t seed, const LassoOptions& options = {}, unsigned workers = 0);

/// Same with an explicit fold assignment (values in [0, k)).
CvResult cross_validate(const Dataset& data, const std::vector<double>& lambdas,
                        const std::vector<int>& folds, int k, const LassoOptions& options = {},
                        unsigned workers = 0);

/// TP = |S n S0| / |S0|, FP = |S \ S0| / (N - |S0|).
TpFp tp_fp(const std::vector<int>& selected, const std::vector<int>& truth, int n_features);

/// sum (candidate - reference)^2 / sum reference^2; the reference is the semi-analytic vector.
double normalized_mse(const Eigen::VectorXd& reference, const Eigen::VectorXd& candidate);

}  // namespace ampr
