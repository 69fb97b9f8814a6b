#pragma once

#include <vector>

#include "ampr/moments.hpp"
#include "ampr/solver.hpp"

namespace ampr {

/**
 * Signal prior with an atom of mass 1 - rho0 at zero. The nonzero part is
 * N(0, signal_variance), or, when `atoms` is non-empty, the uniform law on
 * those values (the nonzero entries of one planted signal).
 */
struct SePrior {
    double rho0 = 0.2;
    double signal_variance = 5.0;
    std::vector<double> atoms;

    /// Unit signal power: signal_variance = 1 / rho0.
    static SePrior unit_power(double rho0) { return {rho0, 1.0 / rho0, {}}; }
    /// Empirical law of a given signal vector, for runs paired with one instance.
    static SePrior empirical(const Eigen::VectorXd& beta0);
    double second_moment() const { return rho0 * signal_variance; }
};

struct SeParams {
    double alpha = 0.5;      ///< M / N
    double noise_var = 0.01;
    double tau = 1.0;
    PenaltyMixture penalty = PenaltyMixture::fixed(1.0);
    SePrior prior = SePrior::unit_power(0.2);
    CountLaw counts = CountLaw::Poisson;
    int quadrature_order = 41;  ///< Gauss-Hermite order for the signal and field integrals
    double tail_tol = kDefaultTailTol;

    /// Throws ConfigError on invalid values, including quadrature_order < 3.
    void validate() const;
};

/**
 * Macroscopic state at step t. A, C and v0 are the coefficients that produced
 * (chi_tilde, w_tilde, mse); f1 and f2 are the count averages at chi_tilde,
 * i.e. the ones the next step consumes.
 */
struct SeState {
    double chi_tilde = 0.0;
    double w_tilde = 0.0;
    double mse = 1.0;
    double A = 0.0;
    double C = 0.0;
    double v0 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    int t = 0;
};

/// State at t = 0 from the given macroscopic values; f1, f2 are filled in.
SeState se_initial(const SeParams& params, double chi_tilde = 0.0, double w_tilde = 0.0,
                   double mse = 1.0);

/// One synchronous update of the recursion.
SeState se_step(const SeState& state, const SeParams& params);

/// Trajectory of length T + 1 starting with `initial`.
std::vector<SeState> se_run(const SeState& initial, const SeParams& params, int steps);

struct SeFixedPoint {
    SeState state;
    bool converged = false;
    int iters = 0;
};

/// Iterates se_step from the cold start until the largest change of (chi, W, MSE) is <= tol.
SeFixedPoint se_fixed_point(const SeParams& params, double tol = 1e-12, int max_iters = 10000);

}  // namespace ampr
