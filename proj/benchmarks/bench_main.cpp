#include <benchmark/benchmark.h>

#include "ampr/ampr.hpp"

namespace {

using namespace ampr;

void BM_GaussSoftMoments(benchmark::State& state) {
    double b = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gauss_soft_moments(b, 0.7, 1.0, 1.3));
        b += 1e-9;
    }
}
BENCHMARK(BM_GaussSoftMoments);

void BM_PoissonAverages(benchmark::State& state) {
    double chi = 0.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(poisson_averages(chi, 0.5));
        chi += 1e-9;
    }
}
BENCHMARK(BM_PoissonAverages);

void BM_AmprSweep(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_features = static_cast<int>(state.range(0));
    spec.seed = 1;
    const auto data = gen_iid(spec);
    AmprConfig config;
    config.tau = 0.5;
    config.penalty = PenaltyMixture(0.1, 0.5, 0.5);
    const AmprSolver solver(data, config);
    auto st = solver.init_state();
    for (auto _ : state) benchmark::DoNotOptimize(solver.sweep(st));
    state.SetComplexityN(state.range(0) * data.n_samples());
}
BENCHMARK(BM_AmprSweep)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_WeightedLasso(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_features = static_cast<int>(state.range(0));
    spec.seed = 2;
    const auto data = gen_iid(spec);
    ResamplingConfig config;
    config.tau = 0.5;
    config.penalty = PenaltyMixture(0.1, 0.5, 0.5);
    const auto draw = make_draw(data, config, 3, 0);
    Eigen::VectorXd c(data.n_samples());
    for (int mu = 0; mu < c.size(); ++mu) c[mu] = draw.counts[mu];
    const WeightedLassoProblem problem{data.X, data.y, c, draw.penalties};
    for (auto _ : state) benchmark::DoNotOptimize(fit_weighted_lasso(problem));
}
BENCHMARK(BM_WeightedLasso)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SeStep(benchmark::State& state) {
    SeParams p;
    p.tau = 0.5;
    p.penalty = PenaltyMixture(1.0, 0.5, 0.5);
    const auto s0 = se_initial(p);
    for (auto _ : state) benchmark::DoNotOptimize(se_step(s0, p));
}
BENCHMARK(BM_SeStep);

}  // namespace
