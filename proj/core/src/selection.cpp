#include "ampr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ampr/errors.hpp"
#include "ampr/parallel.hpp"
#include "ampr/random.hpp"
#include "ampr/weighted_lasso.hpp"

namespace ampr {

namespace {

void require_decreasing(const std::vector<double>& lambdas, const char* who) {
    if (lambdas.empty()) throw ConfigError(std::string(who) + ": empty lambda grid");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0.0)) throw ConfigError(std::string(who) + ": lambdas must be > 0");
        if (k > 0 && !(lambdas[k] < lambdas[k - 1])) {
            throw ConfigError(std::string(who) + ": lambda grid must be strictly decreasing");
        }
    }
}

std::vector<int> support_of(const Eigen::VectorXd& beta) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
        if (beta[i] != 0.0) s.push_back(static_cast<int>(i));
    }
    return s;
}

}  // namespace

std::string to_string(Engine engine) {
    return engine == Engine::Ampr ? "ampr" : "monte-carlo";
}

Engine parse_engine(const std::string& name) {
    if (name == "ampr") return Engine::Ampr;
    if (name == "monte-carlo" || name == "mc") return Engine::MonteCarlo;
    throw ConfigError("unknown engine '" + name + "' (expected ampr or monte-carlo)");
}

AmprConfig SelectionConfig::ampr_config(double lambda) const {
    AmprConfig c;
    c.tau = tau;
    c.penalty = PenaltyMixture(lambda, w, p_w);
    c.damping = damping;
    c.max_iters = max_iters;
    c.conv_tol = conv_tol;
    c.counts = CountLaw::Poisson;
    return c;
}

ResamplingConfig SelectionConfig::resampling_config(double lambda) const {
    ResamplingConfig c;
    c.tau = tau;
    c.penalty = PenaltyMixture(lambda, w, p_w);
    c.mode = count_mode;
    c.lasso = lasso;
    c.workers = workers;
    return c;
}

double bolasso_lambda(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("bolasso_lambda: alpha must be > 0");
    return 0.5 * std::sqrt(alpha);
}

SelectionReport bolasso(const Dataset& data, double lambda, double threshold,
                        const SelectionConfig& config) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("bolasso: threshold must lie in [0, 1]");
    }
    SelectionReport report;
    report.threshold = threshold;
    report.lambda = lambda;
    if (config.engine == Engine::Ampr) {
        const AmprSolver solver(data, config.ampr_config(lambda));
        auto out = solver.run();
        if (!out.converged) {
            throw NonConvergenceError("bolasso: AMPR did not converge in " +
                                      std::to_string(out.iters_used) + " sweeps");
        }
        report.pi = std::move(out.pi);
    } else {
        report.pi = run_resampling(data, config.resampling_config(lambda), config.n_res, config.seed).pi;
    }
    for (Eigen::Index i = 0; i < report.pi.size(); ++i) {
        if (report.pi[i] >= threshold) report.support.push_back(static_cast<int>(i));
    }
    if (data.truth) report.rates = tp_fp(report.support, data.truth->support, data.n_features());
    return report;
}

std::vector<double> default_lambda_grid(const Dataset& data, int points, double min_ratio) {
    if (points < 1) throw ConfigError("lambda grid: need at least one point");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw ConfigError("lambda grid: ratio must lie in (0,1)");
    const double top = lambda_max(data.X, data.y);
    if (!(top > 0.0)) throw DomainError("lambda grid: X^T y is zero");
    std::vector<double> grid(points);
    for (int k = 0; k < points; ++k) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        grid[k] = top * std::pow(min_ratio, frac);
    }
    return grid;
}

StabilityPath stability_path(const Dataset& data, const std::vector<double>& lambdas,
                             const SelectionConfig& config) {
    require_decreasing(lambdas, "stability_path");
    const auto n_grid = static_cast<Eigen::Index>(lambdas.size());
    const Eigen::Index n = data.X.cols();
    StabilityPath path;
    path.lambdas = lambdas;
    path.engine = config.engine;
    path.pi.resize(n_grid, n);
    path.beta_bar.resize(n_grid, n);
    path.w_var.resize(n_grid, n);
    path.converged.assign(lambdas.size(), false);
    path.iterations.assign(lambdas.size(), 0);

    if (config.engine == Engine::MonteCarlo) {
        const auto moments = run_resampling_path(data, config.resampling_config(lambdas.front()),
                                                 lambdas, config.n_res, config.seed);
        for (Eigen::Index k = 0; k < n_grid; ++k) {
            path.pi.row(k) = moments[k].pi.transpose();
            path.beta_bar.row(k) = moments[k].beta_bar.transpose();
            path.w_var.row(k) = moments[k].w_var.transpose();
            path.converged[k] = true;
        }
        return path;
    }

    AmprSolver solver(data, config.ampr_config(lambdas.front()));
    std::optional<WarmStart> warm;
    for (Eigen::Index k = 0; k < n_grid; ++k) {
        solver.set_penalty(PenaltyMixture(lambdas[k], config.w, config.p_w));
        try {
            const auto out = solver.run(warm);
            path.pi.row(k) = out.pi.transpose();
            path.beta_bar.row(k) = out.state.beta_bar.transpose();
            path.w_var.row(k) = out.state.w_var.transpose();
            path.converged[k] = out.converged;
            path.iterations[k] = out.iters_used;
            warm = WarmStart{out.state.beta_bar, out.state.chi, out.state.w_var};
        } catch (const DivergenceError&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            path.pi.row(k).setConstant(nan);
            path.beta_bar.row(k).setConstant(nan);
            path.w_var.row(k).setConstant(nan);
        }
    }
    return path;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("percentile: no values");
    if (!(q >= 0.0 && q <= 100.0)) throw ConfigError("percentile: q must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

RejectionRegion rejection_region(const StabilityPath& path, const std::vector<bool>& noise_mask,
                                 double q_lo, double q_hi) {
    if (static_cast<Eigen::Index>(noise_mask.size()) != path.pi.cols()) {
        throw DimensionError("rejection_region: noise mask length differs from path width");
    }
    if (!(q_lo <= q_hi)) throw ConfigError("rejection_region: q_lo must not exceed q_hi");
    std::vector<Eigen::Index> noise;
    for (std::size_t i = 0; i < noise_mask.size(); ++i) {
        if (noise_mask[i]) noise.push_back(static_cast<Eigen::Index>(i));
    }
    if (noise.empty()) throw ConfigError("rejection_region: no noise columns");

    RejectionRegion region;
    region.lambdas = path.lambdas;
    region.q_lo = q_lo;
    region.q_hi = q_hi;
    region.n_noise = static_cast<int>(noise.size());
    region.few_noise_columns = noise.size() < 20;
    std::vector<double> values(noise.size());
    for (Eigen::Index k = 0; k < path.pi.rows(); ++k) {
        for (std::size_t j = 0; j < noise.size(); ++j) values[j] = path.pi(k, noise[j]);
        region.median.push_back(percentile(values, 50.0));
        region.lower.push_back(percentile(values, q_lo));
        region.upper.push_back(percentile(values, q_hi));
    }
    return region;
}

std::vector<int> make_folds(int n_samples, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("cross validation: k must be >= 2");
    if (k > n_samples) throw ConfigError("cross validation: k exceeds the number of samples");
    std::vector<int> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed, 0xf01d);
    for (int i = n_samples - 1; i > 0; --i) {
        const auto j = static_cast<int>(uniform01(rng) * (i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }
    std::vector<int> folds(static_cast<std::size_t>(n_samples));
    for (int pos = 0; pos < n_samples; ++pos) folds[order[pos]] = pos % k;
    return folds;
}

CvResult cross_validate(const Dataset& data, const std::vector<double>& lambdas, int k,
                        std::uint64_t seed, const LassoOptions& options, unsigned workers) {
    return cross_validate(data, lambdas, make_folds(data.n_samples(), k, seed), k, options, workers);
}

CvResult cross_validate(const Dataset& data, const std::vector<double>& lambdas,
                        const std::vector<int>& folds, int k, const LassoOptions& options,
                        unsigned workers) {
    require_decreasing(lambdas, "cross_validate");
    const int m = data.n_samples();
    if (k < 2) throw ConfigError("cross validation: k must be >= 2");
    if (k > m) throw ConfigError("cross validation: k exceeds the number of samples");
    if (static_cast<int>(folds.size()) != m) throw DimensionError("cross validation: fold vector length");
    std::vector<int> fold_size(k, 0);
    for (int f : folds) {
        if (f < 0 || f >= k) throw ConfigError("cross validation: fold index out of range");
        ++fold_size[f];
    }
    if (std::count(fold_size.begin(), fold_size.end(), 0) > 0) {
        throw ConfigError("cross validation: empty fold");
    }

    const std::size_t n_grid = lambdas.size();
    Eigen::MatrixXd fold_error(k, static_cast<Eigen::Index>(n_grid));
    parallel_for(static_cast<std::size_t>(k), workers, [&](std::size_t f) {
        Eigen::VectorXd train(m);
        for (int mu = 0; mu < m; ++mu) train[mu] = folds[mu] == static_cast<int>(f) ? 0.0 : 1.0;
        const auto path = fit_path(data.X, data.y, train, lambdas, options);
        for (std::size_t g = 0; g < n_grid; ++g) {
            const Eigen::VectorXd residual = data.y - data.X * path[g].beta;
            double sse = 0.0;
            for (int mu = 0; mu < m; ++mu) {
                if (train[mu] == 0.0) sse += residual[mu] * residual[mu];
            }
            fold_error(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(g)) =
                sse / fold_size[f];
        }
    });

    CvResult cv;
    cv.lambdas = lambdas;
    const double kd = static_cast<double>(k);
    for (std::size_t g = 0; g < n_grid; ++g) {
        const auto col = fold_error.col(static_cast<Eigen::Index>(g));
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / (kd - 1.0);
        cv.mean_error.push_back(mean);
        cv.standard_error.push_back(std::sqrt(var / kd));
    }
    cv.index_min = static_cast<std::size_t>(
        std::min_element(cv.mean_error.begin(), cv.mean_error.end()) - cv.mean_error.begin());
    const double bound = cv.mean_error[cv.index_min] + cv.standard_error[cv.index_min];
    cv.index_opt = cv.index_min;
    for (std::size_t g = 0; g <= cv.index_min; ++g) {
        if (cv.mean_error[g] <= bound) {
            cv.index_opt = g;
            break;
        }
    }
    cv.lambda_min = lambdas[cv.index_min];
    cv.lambda_opt = lambdas[cv.index_opt];

    const std::vector<double> head(lambdas.begin(), lambdas.begin() + cv.index_opt + 1);
    const auto full = fit_path(data.X, data.y, Eigen::VectorXd::Ones(m), head, options);
    cv.beta_opt = full.back().beta;
    cv.support_opt = support_of(cv.beta_opt);
    return cv;
}

TpFp tp_fp(const std::vector<int>& selected, const std::vector<int>& truth, int n_features) {
    const std::set<int> s(selected.begin(), selected.end());
    const std::set<int> s0(truth.begin(), truth.end());
    for (int i : s) {
        if (i < 0 || i >= n_features) throw ConfigError("tp_fp: selected index out of range");
    }
    for (int i : s0) {
        if (i < 0 || i >= n_features) throw ConfigError("tp_fp: true index out of range");
    }
    std::size_t hits = 0;
    for (int i : s) hits += s0.count(i);
    TpFp out;
    if (!s0.empty()) out.tp = static_cast<double>(hits) / static_cast<double>(s0.size());
    const std::size_t negatives = static_cast<std::size_t>(n_features) - s0.size();
    out.fp = negatives == 0 ? 0.0
                            : static_cast<double>(s.size() - hits) / static_cast<double>(negatives);
    return out;
}

double normalized_mse(const Eigen::VectorXd& reference, const Eigen::VectorXd& candidate) {
    if (reference.size() != candidate.size()) {
        throw DimensionError("normalized_mse: vectors differ in length");
    }
    const double denom = reference.squaredNorm();
    if (!(denom > 0.0)) throw DomainError("normalized_mse: reference vector is zero");
    return (candidate - reference).squaredNorm() / denom;
}

}  // namespace ampr
