#include "ampr/moments.hpp"

#include <cmath>

#include "ampr/errors.hpp"

namespace ampr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

PoissonAverages poisson_averages(double chi, double tau, double tail_tol) {
    if (!finite_nonneg(chi)) {
        throw DomainError("poisson_averages: chi must be finite and >= 0");
    }
    if (!std::isfinite(tau) || tau <= 0.0) {
        throw DomainError("poisson_averages: tau must be finite and > 0");
    }
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
        throw DomainError("poisson_averages: tail_tol must lie in (0, 1)");
    }
    if (chi == 0.0) {
        return {tau, tau + tau * tau};
    }

    // c = 0 contributes nothing to either average.
    double pmf = std::exp(-tau);
    PoissonAverages out;
    const double settle = 2.0 * tau + 2.0;
    // Underflow of pmf ends the loop well before this for any usable tau.
    const double hard_cap = tau + 40.0 * std::sqrt(tau) + 60.0;
    for (double c = 1.0; c <= hard_cap; c += 1.0) {
        pmf *= tau / c;
        const double g = c / (1.0 + c * chi);
        const double t1 = pmf * g;
        const double t2 = t1 * g;
        out.f1 += t1;
        out.f2 += t2;
        if (c >= settle && t1 <= tail_tol * out.f1 && t2 <= tail_tol * out.f2) break;
    }
    return out;
}

double soft_threshold(double x, double lambda, double curvature) {
    if (!(curvature > 0.0)) {
        throw DomainError("soft_threshold: curvature must be > 0");
    }
    if (!(lambda >= 0.0)) {
        throw DomainError("soft_threshold: lambda must be >= 0");
    }
    if (x > lambda) return (x - lambda) / curvature;
    if (x < -lambda) return (x + lambda) / curvature;
    return 0.0;
}

GaussSoftMoments gauss_soft_moments(double B, double C, double lambda, double curvature) {
    if (!(C >= 0.0)) {
        throw DomainError("gauss_soft_moments: C must be >= 0");
    }
    if (!(lambda >= 0.0)) {
        throw DomainError("gauss_soft_moments: lambda must be >= 0");
    }
    if (!(curvature > 0.0)) {
        throw DomainError("gauss_soft_moments: curvature must be > 0");
    }
    if (std::isinf(lambda)) {
        return {};
    }
    if (C == 0.0) {
        const double s = soft_threshold(B, lambda, curvature);
        return {std::abs(B) > lambda ? 1.0 : 0.0, s, s * s};
    }

    const double sd = std::sqrt(C);
    // Upper branch: X = B + sd z > lambda, shifted mean d = B - lambda.
    const double d = B - lambda;
    const double a = -d / sd;
    const double upper_p = normal_sf(a);
    const double upper_phi = normal_pdf(a);
    // Lower branch: X < -lambda, shifted mean e = B + lambda.
    const double e = B + lambda;
    const double b = -e / sd;
    const double lower_p = normal_cdf(b);
    const double lower_phi = normal_pdf(b);

    const double first = d * upper_p + sd * upper_phi + e * lower_p - sd * lower_phi;
    const double second =
        (d * d + C) * upper_p + d * sd * upper_phi + (e * e + C) * lower_p - e * sd * lower_phi;

    GaussSoftMoments out;
    out.mass = upper_p + lower_p;
    out.m1 = first / curvature;
    out.m2 = std::max(second, 0.0) / (curvature * curvature);
    return out;
}

PenaltyMixture::PenaltyMixture(double lambda, double w, double p_w)
    : lambda_(lambda), w_(w), p_w_(p_w) {
    if (!(lambda >= 0.0) || std::isnan(lambda)) {
        throw ConfigError("penalty mixture: lambda must be >= 0");
    }
    if (!(w > 0.0 && w <= 1.0)) {
        throw ConfigError("penalty mixture: w must lie in (0, 1]");
    }
    if (!(p_w >= 0.0 && p_w <= 1.0)) {
        throw ConfigError("penalty mixture: p_w must lie in [0, 1]");
    }
}

GaussSoftMoments averaged_soft_moments(double B, double C, const PenaltyMixture& mix,
                                       double curvature) {
    if (mix.degenerate()) {
        return gauss_soft_moments(B, C, mix.lambda(), curvature);
    }
    GaussSoftMoments out;
    for (const auto& atom : mix.atoms()) {
        if (atom.weight == 0.0) continue;
        const auto m = gauss_soft_moments(B, C, atom.lambda, curvature);
        out.mass += atom.weight * m.mass;
        out.m1 += atom.weight * m.m1;
        out.m2 += atom.weight * m.m2;
    }
    return out;
}

}  // namespace ampr
