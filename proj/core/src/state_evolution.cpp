#include "ampr/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "ampr/errors.hpp"
#include "ampr/quadrature.hpp"

namespace ampr {

namespace {

const QuadratureRule& cached_rule(int order) {
    static std::mutex mutex;
    static std::unordered_map<int, QuadratureRule> rules;
    std::lock_guard lock(mutex);
    auto it = rules.find(order);
    if (it == rules.end()) it = rules.emplace(order, gauss_hermite_normal(order)).first;
    return it->second;
}

PoissonAverages count_averages(double chi, const SeParams& params) {
    chi = std::max(chi, 0.0);
    if (params.counts == CountLaw::Deterministic) {
        const double f1 = 1.0 / (1.0 + chi);
        return {f1, f1 * f1};
    }
    return poisson_averages(chi, params.tau, params.tail_tol);
}

struct Accumulator {
    double chi = 0.0;
    double w = 0.0;
    double mse = 0.0;
};

// Adds the u-integral for a fixed signal value beta, weighted by `weight`.
void integrate_field(double beta, double weight, double A, double C, double v0,
                     const SeParams& params, const QuadratureRule& rule, Accumulator& acc) {
    const double sd = std::sqrt(v0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double field = A * beta + sd * rule.nodes[k];
        const auto m = averaged_soft_moments(field, C, params.penalty, A);
        const double wk = weight * rule.weights[k];
        acc.chi += wk * m.mass;
        acc.w += wk * std::max(m.m2 - m.m1 * m.m1, 0.0);
        acc.mse += wk * (beta - m.m1) * (beta - m.m1);
    }
}

}  // namespace

SePrior SePrior::empirical(const Eigen::VectorXd& beta0) {
    if (beta0.size() == 0) throw DimensionError("se prior: empty signal vector");
    SePrior prior;
    prior.atoms.clear();
    double power = 0.0;
    for (Eigen::Index i = 0; i < beta0.size(); ++i) {
        if (beta0[i] != 0.0) {
            prior.atoms.push_back(beta0[i]);
            power += beta0[i] * beta0[i];
        }
    }
    prior.rho0 = static_cast<double>(prior.atoms.size()) / static_cast<double>(beta0.size());
    prior.signal_variance = prior.atoms.empty() ? 1.0 : power / static_cast<double>(prior.atoms.size());
    return prior;
}

void SeParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("se: alpha must be > 0");
    if (!(noise_var >= 0.0)) throw ConfigError("se: noise variance must be >= 0");
    if (!(tau > 0.0)) throw ConfigError("se: tau must be > 0");
    if (!(prior.rho0 >= 0.0 && prior.rho0 <= 1.0)) throw ConfigError("se: rho0 must lie in [0, 1]");
    if (!(prior.signal_variance > 0.0)) throw ConfigError("se: signal variance must be > 0");
    if (quadrature_order < 3) throw ConfigError("se: quadrature order must be >= 3");
}

SeState se_initial(const SeParams& params, double chi_tilde, double w_tilde, double mse) {
    params.validate();
    SeState s;
    s.chi_tilde = chi_tilde;
    s.w_tilde = w_tilde;
    s.mse = mse;
    const auto f = count_averages(chi_tilde, params);
    s.f1 = f.f1;
    s.f2 = f.f2;
    return s;
}

SeState se_step(const SeState& state, const SeParams& params) {
    params.validate();
    const double alpha = params.alpha;
    const double f1 = state.f1;
    const double f2 = state.f2;
    const double spread = state.mse + params.noise_var;

    SeState next;
    next.t = state.t + 1;
    next.A = alpha * f1;
    next.C = std::max(alpha * f2 * state.w_tilde + alpha * (f2 - f1 * f1) * spread, 0.0);
    next.v0 = std::max(alpha * f1 * f1 * spread, 0.0);

    const QuadratureRule& rule = cached_rule(params.quadrature_order);
    Accumulator acc;
    const double rho0 = params.prior.rho0;
    if (rho0 < 1.0) {
        integrate_field(0.0, 1.0 - rho0, next.A, next.C, next.v0, params, rule, acc);
    }
    if (rho0 > 0.0 && !params.prior.atoms.empty()) {
        const double weight = rho0 / static_cast<double>(params.prior.atoms.size());
        for (double beta : params.prior.atoms) {
            integrate_field(beta, weight, next.A, next.C, next.v0, params, rule, acc);
        }
    } else if (rho0 > 0.0) {
        const double sd = std::sqrt(params.prior.signal_variance);
        for (std::size_t j = 0; j < rule.size(); ++j) {
            integrate_field(sd * rule.nodes[j], rho0 * rule.weights[j], next.A, next.C, next.v0,
                            params, rule, acc);
        }
    }
    next.chi_tilde = acc.chi / next.A;
    next.w_tilde = acc.w;
    next.mse = acc.mse;
    if (!std::isfinite(next.chi_tilde) || !std::isfinite(next.w_tilde) || !std::isfinite(next.mse)) {
        throw DivergenceError("se: non-finite macroscopic state", next.t);
    }
    const auto f = count_averages(next.chi_tilde, params);
    next.f1 = f.f1;
    next.f2 = f.f2;
    return next;
}

std::vector<SeState> se_run(const SeState& initial, const SeParams& params, int steps) {
    if (steps < 1) throw ConfigError("se_run: number of steps must be >= 1");
    std::vector<SeState> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(initial);
    for (int t = 0; t < steps; ++t) trajectory.push_back(se_step(trajectory.back(), params));
    return trajectory;
}

SeFixedPoint se_fixed_point(const SeParams& params, double tol, int max_iters) {
    if (!(tol > 0.0) || max_iters < 1) throw ConfigError("se_fixed_point: bad tolerance or cap");
    SeFixedPoint out;
    out.state = se_initial(params, 0.0, 0.0, params.prior.second_moment());
    while (out.iters < max_iters) {
        const SeState next = se_step(out.state, params);
        ++out.iters;
        const double change = std::max({std::abs(next.chi_tilde - out.state.chi_tilde),
                                        std::abs(next.w_tilde - out.state.w_tilde),
                                        std::abs(next.mse - out.state.mse)});
        out.state = next;
        if (change <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace ampr
