#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ampr/data.hpp"
#include "ampr/moments.hpp"
#include "ampr/random.hpp"
#include "ampr/weighted_lasso.hpp"

namespace ampr {

enum class CountMode {
    FixedSize,  ///< round(tau M) indices drawn uniformly with replacement
    Poisson,    ///< c_mu ~ Poisson(tau) independently
    Identity,   ///< c_mu = 1, no resampling
};

struct ResamplingConfig {
    double tau = 1.0;
    PenaltyMixture penalty = PenaltyMixture::fixed(1.0);
    CountMode mode = CountMode::FixedSize;
    LassoOptions lasso{};
    unsigned workers = 0;  ///< 0 = all cores

    void validate() const;
};

/// One resampled problem: counts c_mu and per-feature penalties lambda_i.
struct ResampleDraw {
    std::vector<int> counts;
    Eigen::VectorXd penalties;
    std::uint64_t seed_tag = 0;
};

struct EmpiricalMoments {
    Eigen::VectorXd beta_bar;
    Eigen::VectorXd w_var;  ///< unbiased (n_res - 1) inter-sample variance
    Eigen::VectorXd pi;     ///< fraction of resamples with beta_i != 0
    int n_res = 0;
};

/// Throws ConfigError for tau <= 0 or (fixed-size) round(tau M) < 1.
std::vector<int> draw_counts(int n_samples, double tau, CountMode mode, CounterRng& rng);

/// Draws the randomized-penalty indicators; lambda_i = lambda/w where the indicator is set.
std::vector<bool> draw_penalty_atoms(int n_features, const PenaltyMixture& mix, CounterRng& rng);

/// Each lambda_i is lambda/w with probability p_w, else lambda.
Eigen::VectorXd draw_penalties(int n_features, const PenaltyMixture& mix, CounterRng& rng);

/// Seed tag of resample `index` under `base_seed`.
std::uint64_t resample_seed_tag(std::uint64_t base_seed, std::uint64_t index);

/// The draw used by resample `index`; the same index always yields the same draw.
ResampleDraw make_draw(const Dataset& data, const ResamplingConfig& config,
                       std::uint64_t base_seed, std::uint64_t index);

/**
 * Direct Monte-Carlo estimate of the resampling averages: n_res independent
 * draws, each solved by coordinate descent. Bit-identical for a given
 * (data, config, n_res, base_seed) regardless of the worker count. Throws
 * ResampleError with the seed tag of a failing inner solve.
 */
EmpiricalMoments run_resampling(const Dataset& data, const ResamplingConfig& config, int n_res,
                                std::uint64_t base_seed);

/// Moments from explicitly supplied draws (used for forced-draw checks).
EmpiricalMoments run_draws(const Dataset& data, const ResamplingConfig& config,
                           const std::vector<ResampleDraw>& draws);

/**
 * Monte-Carlo moments along a strictly decreasing lambda grid. Each resample
 * keeps its counts and penalty indicators across the grid and is solved with
 * warm starts, so the estimated paths are smooth in lambda. The mixture's own
 * lambda is ignored; w and p_w are taken from config.penalty.
 */
std::vector<EmpiricalMoments> run_resampling_path(const Dataset& data,
                                                  const ResamplingConfig& config,
                                                  const std::vector<double>& lambdas, int n_res,
                                                  std::uint64_t base_seed);

}  // namespace ampr
