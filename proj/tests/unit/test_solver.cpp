#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ampr/errors.hpp"
#include "ampr/solver.hpp"
#include "ampr/weighted_lasso.hpp"
#include "oracles.hpp"

namespace ampr {
namespace {

Dataset toy_system() {
    Dataset d;
    d.X.resize(3, 2);
    d.X << 0.5, -0.2,  //
        0.3, 0.8,      //
        -0.6, 0.1;
    d.y.resize(3);
    d.y << 1.0, -0.5, 0.3;
    d.column_labels = {"x1", "x2"};
    d.noise_mask = {false, false};
    return d;
}

Dataset synthetic(int n, std::uint64_t seed, double alpha = 0.5) {
    SyntheticSpec spec;
    spec.n_features = n;
    spec.alpha = alpha;
    spec.seed = seed;
    return gen_iid(spec);
}

AmprConfig config_with(double lambda, double tau = 1.0) {
    AmprConfig c;
    c.tau = tau;
    c.penalty = PenaltyMixture::fixed(lambda);
    return c;
}

TEST(AmprInit, ColdStartResidual) {
    const auto data = synthetic(200, 1);
    const auto s1 = AmprSolver(data, config_with(1.0, 1.0)).init_state();
    EXPECT_TRUE((s1.f1.array() == 1.0).all());
    EXPECT_EQ(s1.a, data.y);
    const auto s2 = AmprSolver(data, config_with(1.0, 0.5)).init_state();
    EXPECT_TRUE((s2.f1.array() == 0.5).all());
    EXPECT_LE((s2.a - 0.5 * data.y).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AmprInit, WarmStartPassThrough) {
    const auto data = synthetic(100, 2);
    const AmprSolver solver(data, config_with(0.5));
    const auto out = solver.run();
    const WarmStart warm{out.state.beta_bar, out.state.chi, out.state.w_var};
    const auto s = solver.init_state(warm);
    EXPECT_EQ(s.beta_bar, warm.beta_bar);
    EXPECT_EQ(s.chi, warm.chi);
    EXPECT_EQ(s.w_var, warm.w_var);
    EXPECT_THROW(solver.init_state(WarmStart{Eigen::VectorXd::Zero(3), warm.chi, warm.w_var}),
                 DimensionError);
}

TEST(AmprSweep, ToyGolden) {
    // Two sweeps of the update evaluated at 40 digits with numerical
    // integration over z and direct Poisson sums.
    const auto data = toy_system();
    const AmprSolver solver(data, config_with(0.1));
    auto s = solver.init_state();
    solver.sweep(s);
    const double tol = 1e-12;
    EXPECT_NEAR(s.A[0], 0.7, tol);
    EXPECT_NEAR(s.A[1], 0.69, tol);
    EXPECT_NEAR(s.B[0], 0.17, tol);
    EXPECT_NEAR(s.B[1], -0.57, tol);
    EXPECT_NEAR(s.C[0], 0.3049, tol);
    EXPECT_NEAR(s.C[1], 0.2009, tol);
    EXPECT_NEAR(s.beta_bar[0], 0.20849346606681881213, tol);
    EXPECT_NEAR(s.beta_bar[1], -0.71119079787084141763, tol);
    EXPECT_NEAR(s.chi[0], 1.2326706351705338544, tol);
    EXPECT_NEAR(s.chi[1], 1.3337685791023119114, tol);
    EXPECT_NEAR(s.w_var[0], 0.46894521253054768951, tol);
    EXPECT_NEAR(s.w_var[1], 0.36139747536628608756, tol);
    EXPECT_NEAR(s.a[0], 0.6730369676151376218, tol);
    EXPECT_NEAR(s.a[1], -0.17886777201982343266, tol);
    EXPECT_NEAR(s.a[2], 0.34804160366849224901, tol);

    solver.sweep(s);
    EXPECT_NEAR(s.A[0], 0.38255984553191871714, tol);
    EXPECT_NEAR(s.A[1], 0.2701988032525585625, tol);
    EXPECT_NEAR(s.B[0], 0.15379441817346297311, tol);
    EXPECT_NEAR(s.B[1], -0.43506035324097067081, tol);
    EXPECT_NEAR(s.C[0], 0.17149672537912892842, tol);
    EXPECT_NEAR(s.C[1], 0.071347751657646900417, tol);
    EXPECT_NEAR(s.beta_bar[0], 0.32699928210051053338, tol);
    EXPECT_NEAR(s.beta_bar[1], -1.2812797854055548353, tol);
    EXPECT_NEAR(s.chi[0], 2.1478078186873895001, tol);
    EXPECT_NEAR(s.chi[1], 3.3965021860076689755, tol);
    EXPECT_NEAR(s.w_var[0], 0.80841081970693014967, tol);
    EXPECT_NEAR(s.w_var[1], 0.83788239942562844008, tol);
    EXPECT_NEAR(s.a[0], 0.47369012040723723003, tol);
    EXPECT_NEAR(s.a[1], 0.00071854333255795288361, tol);
    EXPECT_NEAR(s.a[2], 0.37676531255377112119, tol);
    EXPECT_EQ(s.iter, 2);
}

TEST(AmprSweep, FreeFunctionMatchesSolver) {
    const auto data = toy_system();
    const auto config = config_with(0.1);
    const AmprSolver solver(data, config);
    auto s = solver.init_state();
    const auto next = ampr_sweep(s, data, config);
    solver.sweep(s);
    EXPECT_EQ(s.beta_bar, next.beta_bar);
    EXPECT_EQ(s.a, next.a);
}

TEST(AmprSweep, DeterministicCountsKeepVarianceAtZero) {
    const auto data = synthetic(300, 3);
    auto config = config_with(0.5);
    config.counts = CountLaw::Deterministic;
    const AmprSolver solver(data, config);
    auto s = solver.init_state();
    for (int t = 0; t < 10; ++t) {
        solver.sweep(s);
        EXPECT_EQ(s.C.cwiseAbs().maxCoeff(), 0.0) << t;
        EXPECT_EQ(s.w_var.cwiseAbs().maxCoeff(), 0.0) << t;
    }
}

TEST(AmprSweep, HugePenaltyIsFixedPoint) {
    const auto data = synthetic(200, 4);
    const auto out = AmprSolver(data, config_with(1e6)).run();
    EXPECT_TRUE(out.converged);
    EXPECT_LE(out.iters_used, 2);
    EXPECT_EQ(out.state.beta_bar.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.state.chi.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.state.w_var.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.pi.maxCoeff(), 0.0);
}

TEST(AmprSweep, InvariantsHoldEverySweep) {
    testing::Draws draws(77);
    for (int rep = 0; rep < 6; ++rep) {
        const auto data = synthetic(150 + 50 * rep, 10 + rep);
        AmprConfig config;
        config.tau = draws.uniform(0.3, 1.5);
        config.penalty = PenaltyMixture(draws.uniform(0.05, 2.0), draws.uniform(0.3, 1.0),
                                        draws.uniform(0.0, 1.0));
        config.damping = draws.uniform(0.5, 1.0);
        const AmprSolver solver(data, config);
        const Eigen::MatrixXd x2 = data.X.array().square();
        auto s = solver.init_state();
        for (int t = 0; t < 15; ++t) {
            solver.sweep(s);
            ASSERT_GE(s.w_var.minCoeff(), 0.0);
            ASSERT_GE(s.chi.minCoeff(), 0.0);
            ASSERT_GE(s.C.minCoeff(), 0.0);
            ASSERT_LE((s.chi_mu - x2 * s.chi).cwiseAbs().maxCoeff(), 1e-12);
            ASSERT_LE((s.w_mu - x2 * s.w_var).cwiseAbs().maxCoeff(), 1e-12);
            const auto pi = positive_probability(s.A, s.B, s.C, config.penalty);
            ASSERT_GE(pi.minCoeff(), 0.0);
            ASSERT_LE(pi.maxCoeff(), 1.0);
        }
    }
}

TEST(AmprRun, BitReproducible) {
    const auto data = synthetic(300, 5);
    AmprConfig config = config_with(0.7, 0.5);
    config.penalty = PenaltyMixture(0.7, 0.5, 0.5);
    const auto a = AmprSolver(data, config).run();
    const auto b = AmprSolver(data, config).run();
    EXPECT_EQ(a.state.beta_bar, b.state.beta_bar);
    EXPECT_EQ(a.state.w_var, b.state.w_var);
    EXPECT_EQ(a.pi, b.pi);
    EXPECT_EQ(a.residual_history, b.residual_history);
}

TEST(AmprRun, DeterministicModeMatchesLasso) {
    const auto data = synthetic(500, 6);
    auto config = config_with(1.0);
    config.counts = CountLaw::Deterministic;
    config.conv_tol = 1e-12;
    config.max_iters = 5000;
    const auto out = AmprSolver(data, config).run();
    ASSERT_TRUE(out.converged);
    const WeightedLassoProblem p{data.X, data.y, Eigen::VectorXd::Ones(data.n_samples()),
                                Eigen::VectorXd::Ones(data.n_features())};
    const auto lasso = fit_weighted_lasso(p);
    EXPECT_LE((out.state.beta_bar - lasso.beta).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(AmprRun, PositiveProbabilityNonIncreasingAlongPath) {
    const auto data = synthetic(400, 7);
    AmprConfig config = config_with(2.0);
    AmprSolver solver(data, config);
    std::optional<WarmStart> warm;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(data.n_features());
    int violations = 0;
    int checks = 0;
    for (double lam = 2.0; lam > 0.05; lam *= 0.8) {
        solver.set_penalty(PenaltyMixture::fixed(lam));
        const auto out = solver.run(warm);
        ASSERT_TRUE(out.converged) << lam;
        warm = WarmStart{out.state.beta_bar, out.state.chi, out.state.w_var};
        if (lam < 2.0) {
            for (int i = 0; i < data.n_features(); ++i) {
                ++checks;
                violations += out.pi[i] < prev[i] - 1e-3;
            }
        }
        prev = out.pi;
    }
    EXPECT_LE(violations, checks / 100);
}

TEST(AmprRun, ConvergedStateIsStationaryInAllBlocks) {
    const auto data = synthetic(300, 12);
    auto config = config_with(1.0, 0.5);
    config.penalty = PenaltyMixture(1.0, 0.5, 0.5);
    config.conv_tol = 1e-9;
    const AmprSolver solver(data, config);
    const auto out = solver.run();
    ASSERT_TRUE(out.converged);
    auto next = out.state;
    solver.sweep(next);
    for (Eigen::Index i = 0; i < next.chi.size(); ++i) {
        EXPECT_LE(std::abs(next.chi[i] - out.state.chi[i]), 1e-7 * std::max(1.0, out.state.chi[i]));
        EXPECT_LE(std::abs(next.w_var[i] - out.state.w_var[i]), 1e-7 * std::max(1.0, out.state.w_var[i]));
    }
}

TEST(DampingBackoff, RecoversOnCorrelatedDesign) {
    SyntheticSpec spec;
    spec.n_features = 300;
    spec.r_com = 0.6;
    spec.seed = 3;
    const auto data = generate(spec);
    auto config = config_with(1.0);
    config.max_iters = 20000;
    EXPECT_THROW(AmprSolver(data, config).run(), DivergenceError);

    const auto out = run_with_damping_backoff(data, config, 1e-3);
    EXPECT_TRUE(out.converged);
    EXPECT_LT(out.damping, 1.0);
    // the accepted damping is a power of one half
    EXPECT_EQ(std::exp2(std::round(std::log2(out.damping))), out.damping);

    config.damping = out.damping;
    const auto direct = AmprSolver(data, config).run();
    EXPECT_EQ(direct.state.beta_bar, out.state.beta_bar);
    EXPECT_EQ(direct.iters_used, out.iters_used);
}

TEST(DampingBackoff, StopsAtMinimumAndValidates) {
    const auto data = synthetic(100, 4);
    auto config = config_with(0.5);
    config.max_iters = 1;
    const auto out = run_with_damping_backoff(data, config, 0.3);
    EXPECT_FALSE(out.converged);
    EXPECT_EQ(out.damping, 0.5);
    EXPECT_THROW(run_with_damping_backoff(data, config, 0.0), ConfigError);
    EXPECT_THROW(run_with_damping_backoff(data, config, 2.0), ConfigError);
    const auto fine = run_with_damping_backoff(data, config_with(0.5), 0.5);
    EXPECT_TRUE(fine.converged);
    EXPECT_EQ(fine.damping, 1.0);
}

TEST(AmprConfig, Validation) {
    const auto data = toy_system();
    AmprConfig c;
    c.damping = 0.0;
    EXPECT_THROW(AmprSolver(data, c), ConfigError);
    c = {};
    c.tau = -1;
    EXPECT_THROW(AmprSolver(data, c), ConfigError);
    c = {};
    c.max_iters = 0;
    EXPECT_THROW(AmprSolver(data, c), ConfigError);
    Dataset bad = data;
    bad.y.resize(2);
    EXPECT_THROW(AmprSolver(bad, AmprConfig{}), DimensionError);
}

TEST(PositiveProbability, Examples) {
    Eigen::VectorXd A(3), B(3), C(3);
    A << 1, 1, 1;
    B << 5, 0.5, 0;
    C << 0, 0, 1;
    const PenaltyMixture mix(1.0, 0.5, 0.5);  // atoms 2 and 1
    const auto pi = positive_probability(A, B, C, mix);
    EXPECT_EQ(pi[0], 1.0);
    EXPECT_EQ(pi[1], 0.0);
    const auto fixed = positive_probability(A, B, C, PenaltyMixture::fixed(1.0));
    EXPECT_NEAR(fixed[2], 0.31731050786291410283, 1e-14);
}

TEST(MarginalCdf, LimitsAndAtom) {
    const auto data = toy_system();
    const auto config = AmprConfig{1.0, PenaltyMixture(0.1, 0.5, 0.5)};
    const AmprSolver solver(data, config);
    auto s = solver.init_state();
    solver.sweep(s);
    const auto pi = positive_probability(s.A, s.B, s.C, config.penalty);
    const double inf = std::numeric_limits<double>::infinity();
    const double below = -1e-300;
    const auto cdf = marginal_cdf(0, s.A, s.B, s.C, config.penalty, {-inf, below, 0.0, 1e6, inf});
    EXPECT_EQ(cdf[0], 0.0);
    EXPECT_NEAR(cdf[2] - cdf[1], 1.0 - pi[0], 1e-14);
    EXPECT_NEAR(cdf[3], 1.0, 1e-15);
    EXPECT_EQ(cdf[4], 1.0);
    EXPECT_THROW(marginal_cdf(0, s.A, s.B, s.C, config.penalty, {1.0, 0.0}), ConfigError);
    EXPECT_THROW(marginal_cdf(5, s.A, s.B, s.C, config.penalty, {0.0}), DimensionError);
}

TEST(MarginalCdf, MatchesSampling) {
    const auto data = toy_system();
    const auto config = AmprConfig{1.0, PenaltyMixture(0.1, 0.5, 0.5)};
    const AmprSolver solver(data, config);
    auto s = solver.init_state();
    solver.sweep(s);
    const std::vector<double> grid{-0.5, 0.0, 0.6};
    for (int i = 0; i < 2; ++i) {
        const auto cdf = marginal_cdf(i, s.A, s.B, s.C, config.penalty, grid);
        std::mt19937_64 rng(1234 + i);
        std::normal_distribution<double> z;
        std::bernoulli_distribution scaled(0.5);
        constexpr int n = 10'000'000;
        std::vector<int> hits(grid.size(), 0);
        const double sd = std::sqrt(s.C[i]);
        for (int k = 0; k < n; ++k) {
            const double lam = scaled(rng) ? 0.2 : 0.1;
            const double v = soft_threshold(s.B[i] + sd * z(rng), lam, s.A[i]);
            for (std::size_t g = 0; g < grid.size(); ++g) hits[g] += v <= grid[g];
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double p = static_cast<double>(hits[g]) / n;
            EXPECT_NEAR(cdf[g], p, 5.0 * std::sqrt(0.25 / n)) << "i=" << i << " t=" << grid[g];
        }
    }
}

TEST(Macroscopics, MeansAndMse) {
    AmprState s;
    s.beta_bar = Eigen::Vector3d(1, 0, -1);
    s.chi = Eigen::Vector3d(0.5, 0.5, 2);
    s.w_var = Eigen::Vector3d(0, 0.3, 0);
    const Eigen::VectorXd beta0 = Eigen::Vector3d(1, 1, 1);
    const auto m = macroscopics(s, &beta0);
    EXPECT_DOUBLE_EQ(m.chi_tilde, 1.0);
    EXPECT_DOUBLE_EQ(m.w_tilde, 0.1);
    ASSERT_TRUE(m.mse);
    EXPECT_DOUBLE_EQ(*m.mse, 5.0 / 3.0);
    EXPECT_FALSE(macroscopics(s).mse);
}

}  // namespace
}  // namespace ampr
