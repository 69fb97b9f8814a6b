#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace ampr {

inline constexpr double kDefaultTailTol = 1e-14;

/// Standard normal density.
double normal_pdf(double x) noexcept;
/// Standard normal cdf, evaluated through erfc so both tails keep relative accuracy.
double normal_cdf(double x) noexcept;
/// Upper tail 1 - normal_cdf(x).
double normal_sf(double x) noexcept;

/// Poisson(tau) averages of g(c) = c/(1+c chi) and its square.
struct PoissonAverages {
    double f1 = 0.0;
    double f2 = 0.0;
};

/**
 * Poisson-weighted averages [c/(1+c chi)]_c and [(c/(1+c chi))^2]_c.
 *
 * The sum stops past c = 2 tau + 2, where consecutive terms at least halve,
 * once the next terms of both sums fall below tail_tol times the partial sums;
 * the truncated tails are then bounded by tail_tol relative. At chi = 0 the
 * exact moments (tau, tau + tau^2) are returned.
 * Throws DomainError for negative or non-finite chi, non-positive tau, or
 * tail_tol outside (0, 1).
 */
PoissonAverages poisson_averages(double chi, double tau, double tail_tol = kDefaultTailTol);

/// (x - lambda sign(x)) / curvature outside the dead zone |x| <= lambda, exactly 0 inside.
double soft_threshold(double x, double lambda, double curvature);

/// Gaussian moments of the soft-thresholded variable S_lambda(B + sqrt(C) z; A), z ~ N(0,1).
struct GaussSoftMoments {
    double mass = 0.0;  ///< P(|B + sqrt(C) z| > lambda)
    double m1 = 0.0;    ///< E[S]
    double m2 = 0.0;    ///< E[S^2]
};

/**
 * Closed-form truncated-Gaussian moments of the soft threshold.
 * C = 0 degenerates to the point mass at B. Throws DomainError for C < 0,
 * lambda < 0 or curvature <= 0.
 */
GaussSoftMoments gauss_soft_moments(double B, double C, double lambda, double curvature);

/**
 * Two-atom penalty law: lambda/w with probability p_w, lambda otherwise.
 * With w = 1 both atoms coincide and the mixture is a point mass at lambda.
 */
class PenaltyMixture {
public:
    struct Atom {
        double lambda;
        double weight;
    };

    PenaltyMixture() = default;
    /// Throws ConfigError unless lambda >= 0, w in (0,1], p_w in [0,1].
    PenaltyMixture(double lambda, double w, double p_w);

    static PenaltyMixture fixed(double lambda) { return {lambda, 1.0, 0.0}; }

    double lambda() const noexcept { return lambda_; }
    double w() const noexcept { return w_; }
    double p_w() const noexcept { return p_w_; }
    bool degenerate() const noexcept { return w_ == 1.0 || p_w_ == 0.0; }

    /// {lambda/w, p_w} then {lambda, 1 - p_w}.
    std::array<Atom, 2> atoms() const noexcept {
        return {Atom{lambda_ / w_, p_w_}, Atom{lambda_, 1.0 - p_w_}};
    }

    PenaltyMixture with_lambda(double lambda) const { return {lambda, w_, p_w_}; }

private:
    double lambda_ = 0.0;
    double w_ = 1.0;
    double p_w_ = 0.0;
};

/// p_w g(lambda/w) + (1 - p_w) g(lambda). Degenerate mixtures evaluate g once.
template <class F>
auto penalty_average(const PenaltyMixture& mix, F&& g) -> decltype(g(0.0)) {
    if (mix.degenerate()) {
        return g(mix.lambda());
    }
    const auto atoms = mix.atoms();
    return atoms[0].weight * g(atoms[0].lambda) + atoms[1].weight * g(atoms[1].lambda);
}

/// Mixture average of gauss_soft_moments, component-wise.
GaussSoftMoments averaged_soft_moments(double B, double C, const PenaltyMixture& mix,
                                       double curvature);

}  // namespace ampr
