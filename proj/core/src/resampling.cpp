#include "ampr/resampling.hpp"

#include <cmath>
#include <random>

#include "ampr/errors.hpp"
#include "ampr/parallel.hpp"

namespace ampr {

namespace {

// Resamples are reduced in fixed blocks so the summation order never depends
// on the worker count.
constexpr int kBlock = 16;

// Running mean / sum of squared deviations, merged with Chan's update.
struct MomentBlock {
    Eigen::VectorXd mean;
    Eigen::VectorXd m2;
    Eigen::VectorXd nonzero;
    double count = 0.0;

    explicit MomentBlock(Eigen::Index n)
        : mean(Eigen::VectorXd::Zero(n)), m2(Eigen::VectorXd::Zero(n)),
          nonzero(Eigen::VectorXd::Zero(n)) {}

    void add(const Eigen::VectorXd& beta) {
        count += 1.0;
        const Eigen::VectorXd delta = beta - mean;
        mean += delta / count;
        m2.array() += delta.array() * (beta - mean).array();
        nonzero.array() += (beta.array() != 0.0).cast<double>();
    }

    void merge(const MomentBlock& other) {
        if (other.count == 0.0) return;
        const double total = count + other.count;
        const Eigen::VectorXd delta = other.mean - mean;
        mean += delta * (other.count / total);
        m2 += other.m2 + delta.cwiseAbs2() * (count * other.count / total);
        nonzero += other.nonzero;
        count = total;
    }

    EmpiricalMoments finish() const {
        EmpiricalMoments out;
        out.n_res = static_cast<int>(count);
        out.beta_bar = mean;
        out.w_var = count > 1.0 ? Eigen::VectorXd(m2 / (count - 1.0)) : Eigen::VectorXd::Zero(mean.size());
        out.w_var = out.w_var.cwiseMax(0.0);
        out.pi = nonzero / count;
        return out;
    }
};

Eigen::VectorXd counts_as_weights(const std::vector<int>& counts) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t k = 0; k < counts.size(); ++k) w[static_cast<Eigen::Index>(k)] = counts[k];
    return w;
}

void require_success(const LassoSolution& sol, std::uint64_t tag) {
    if (!sol.converged) throw ResampleError("resampling: inner lasso hit max_iters", tag);
    if (!sol.beta.allFinite()) throw ResampleError("resampling: non-finite lasso solution", tag);
}

}  // namespace

void ResamplingConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("resampling: tau must be > 0");
}

std::vector<int> draw_counts(int n_samples, double tau, CountMode mode, CounterRng& rng) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("draw_counts: tau must be > 0");
    if (n_samples < 1) throw ConfigError("draw_counts: need at least one sample");
    std::vector<int> counts(static_cast<std::size_t>(n_samples), 0);
    switch (mode) {
    case CountMode::Identity:
        std::fill(counts.begin(), counts.end(), 1);
        break;
    case CountMode::Poisson: {
        std::poisson_distribution<int> poisson(tau);
        for (int& c : counts) c = poisson(rng);
        break;
    }
    case CountMode::FixedSize: {
        const long m = std::lround(tau * n_samples);
        if (m < 1) throw ConfigError("draw_counts: round(tau M) must be >= 1");
        std::uniform_int_distribution<int> pick(0, n_samples - 1);
        for (long k = 0; k < m; ++k) ++counts[static_cast<std::size_t>(pick(rng))];
        break;
    }
    }
    return counts;
}

std::vector<bool> draw_penalty_atoms(int n_features, const PenaltyMixture& mix, CounterRng& rng) {
    std::vector<bool> scaled(static_cast<std::size_t>(n_features), false);
    for (int i = 0; i < n_features; ++i) scaled[i] = uniform01(rng) < mix.p_w();
    return scaled;
}

Eigen::VectorXd draw_penalties(int n_features, const PenaltyMixture& mix, CounterRng& rng) {
    const auto scaled = draw_penalty_atoms(n_features, mix, rng);
    Eigen::VectorXd lam(n_features);
    for (int i = 0; i < n_features; ++i) lam[i] = scaled[i] ? mix.lambda() / mix.w() : mix.lambda();
    return lam;
}

std::uint64_t resample_seed_tag(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(base_seed ^ mix64(index ^ 0xa0761d6478bd642fULL));
}

ResampleDraw make_draw(const Dataset& data, const ResamplingConfig& config,
                       std::uint64_t base_seed, std::uint64_t index) {
    ResampleDraw draw;
    draw.seed_tag = resample_seed_tag(base_seed, index);
    CounterRng count_rng(draw.seed_tag, 1);
    CounterRng penalty_rng(draw.seed_tag, 2);
    draw.counts = draw_counts(data.n_samples(), config.tau, config.mode, count_rng);
    draw.penalties = draw_penalties(data.n_features(), config.penalty, penalty_rng);
    return draw;
}

namespace {

template <class DrawAt>
EmpiricalMoments accumulate(const Dataset& data, const ResamplingConfig& config,
                            std::size_t n_draws, DrawAt&& draw_at) {
    const Eigen::Index n = data.X.cols();
    const std::size_t n_blocks = (n_draws + kBlock - 1) / kBlock;
    std::vector<MomentBlock> blocks(n_blocks, MomentBlock(n));

    parallel_for(n_blocks, config.workers, [&](std::size_t b) {
        const std::size_t end = std::min(n_draws, (b + 1) * kBlock);
        for (std::size_t r = b * kBlock; r < end; ++r) {
            const ResampleDraw draw = draw_at(r);
            WeightedLassoProblem problem{data.X, data.y, counts_as_weights(draw.counts),
                                         draw.penalties};
            const auto sol = fit_weighted_lasso(problem, config.lasso);
            require_success(sol, draw.seed_tag);
            blocks[b].add(sol.beta);
        }
    });

    MomentBlock total(n);
    for (const auto& block : blocks) total.merge(block);
    return total.finish();
}

}  // namespace

EmpiricalMoments run_draws(const Dataset& data, const ResamplingConfig& config,
                           const std::vector<ResampleDraw>& draws) {
    config.validate();
    if (draws.size() < 2) throw ConfigError("resampling: need at least two resamples");
    return accumulate(data, config, draws.size(), [&](std::size_t r) { return draws[r]; });
}

EmpiricalMoments run_resampling(const Dataset& data, const ResamplingConfig& config, int n_res,
                                std::uint64_t base_seed) {
    config.validate();
    if (n_res < 2) throw ConfigError("resampling: n_res must be >= 2");
    return accumulate(data, config, static_cast<std::size_t>(n_res),
                      [&](std::size_t r) { return make_draw(data, config, base_seed, r); });
}

std::vector<EmpiricalMoments> run_resampling_path(const Dataset& data,
                                                  const ResamplingConfig& config,
                                                  const std::vector<double>& lambdas, int n_res,
                                                  std::uint64_t base_seed) {
    config.validate();
    if (n_res < 2) throw ConfigError("resampling: n_res must be >= 2");
    if (lambdas.empty()) throw ConfigError("resampling: empty lambda grid");
    for (std::size_t k = 1; k < lambdas.size(); ++k) {
        if (!(lambdas[k] < lambdas[k - 1])) {
            throw ConfigError("resampling: lambda grid must be strictly decreasing");
        }
    }
    const Eigen::Index n = data.X.cols();
    const std::size_t n_grid = lambdas.size();
    const std::size_t n_blocks = (static_cast<std::size_t>(n_res) + kBlock - 1) / kBlock;
    std::vector<std::vector<MomentBlock>> blocks(n_blocks,
                                                 std::vector<MomentBlock>(n_grid, MomentBlock(n)));

    parallel_for(n_blocks, config.workers, [&](std::size_t b) {
        const std::size_t end = std::min<std::size_t>(n_res, (b + 1) * kBlock);
        for (std::size_t r = b * kBlock; r < end; ++r) {
            const auto tag = resample_seed_tag(base_seed, r);
            CounterRng count_rng(tag, 1);
            CounterRng penalty_rng(tag, 2);
            const auto counts = draw_counts(data.n_samples(), config.tau, config.mode, count_rng);
            const auto scaled = draw_penalty_atoms(data.n_features(), config.penalty, penalty_rng);
            Eigen::VectorXd shape(n);
            for (Eigen::Index i = 0; i < n; ++i) shape[i] = scaled[i] ? 1.0 / config.penalty.w() : 1.0;

            const auto path = fit_path(data.X, data.y, counts_as_weights(counts), lambdas,
                                       config.lasso, &shape);
            for (std::size_t k = 0; k < n_grid; ++k) {
                require_success(path[k], tag);
                blocks[b][k].add(path[k].beta);
            }
        }
    });

    std::vector<EmpiricalMoments> out;
    out.reserve(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) {
        MomentBlock total(n);
        for (const auto& block : blocks) total.merge(block[k]);
        out.push_back(total.finish());
    }
    return out;
}

}  // namespace ampr
