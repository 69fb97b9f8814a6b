#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ampr/errors.hpp"
#include "ampr/moments.hpp"
#include "oracles.hpp"

namespace ampr {
namespace {

using testing::Draws;
using testing::quadrature_soft_moments;
using testing::summed_poisson_averages;

TEST(NormalCdf, TailsKeepRelativeAccuracy) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    // Phi(-10) = 7.6198530241605260659e-24
    EXPECT_NEAR(normal_cdf(-10.0) / 7.6198530241605260659e-24, 1.0, 1e-13);
    EXPECT_NEAR(normal_sf(10.0) / 7.6198530241605260659e-24, 1.0, 1e-13);
    EXPECT_NEAR(normal_cdf(1.0) + normal_sf(1.0), 1.0, 1e-16);
}

TEST(PoissonAverages, ZeroChiGivesRawMoments) {
    auto f = poisson_averages(0.0, 1.0);
    EXPECT_EQ(f.f1, 1.0);
    EXPECT_EQ(f.f2, 2.0);
    f = poisson_averages(0.0, 0.5);
    EXPECT_EQ(f.f1, 0.5);
    EXPECT_EQ(f.f2, 0.75);
}

TEST(PoissonAverages, GoldenAtUnitChi) {
    // 40-digit summation to c = 400; the default tail cut leaves ~1e-15.
    const auto f = poisson_averages(1.0, 1.0);
    EXPECT_NEAR(f.f1, 0.36787944117144232160, 1e-13);
    EXPECT_NEAR(f.f2, 0.22058798933857228950, 1e-13);
    const auto g = poisson_averages(0.3, 0.5);
    EXPECT_NEAR(g.f1, 0.35122131224961900211, 1e-13);
    EXPECT_NEAR(g.f2, 0.33533148458764375731, 1e-13);
    const auto tight = poisson_averages(1.0, 1.0, 1e-30);
    EXPECT_NEAR(tight.f1, 0.36787944117144232160, 2e-16);
}

TEST(PoissonAverages, MatchesLongSummation) {
    Draws draws(11);
    for (int k = 0; k < 300; ++k) {
        const double chi = draws.uniform(0.0, 20.0);
        const double tau = draws.uniform(0.05, 4.0);
        const auto got = poisson_averages(chi, tau);
        const auto want = summed_poisson_averages(chi, tau);
        ASSERT_NEAR(got.f1, want.f1, 1e-12) << "chi=" << chi << " tau=" << tau;
        ASSERT_NEAR(got.f2, want.f2, 1e-12) << "chi=" << chi << " tau=" << tau;
    }
}

TEST(PoissonAverages, SecondMomentTailAtSmallChi) {
    // g^2 grows like c^2 when chi is small, so the f2 tail outweighs the mass tail.
    for (double tau : {1.5, 3.2, 4.0, 8.0}) {
        for (double chi : {1e-4, 4e-3, 2e-2}) {
            const auto got = poisson_averages(chi, tau);
            const auto want = summed_poisson_averages(chi, tau);
            EXPECT_NEAR(got.f1 / want.f1, 1.0, 1e-13) << tau << " " << chi;
            EXPECT_NEAR(got.f2 / want.f2, 1.0, 1e-13) << tau << " " << chi;
        }
    }
}

TEST(PoissonAverages, NonIncreasingInChi) {
    for (double tau : {0.3, 0.5, 1.0, 2.5}) {
        auto prev = poisson_averages(0.0, tau);
        for (double chi = 0.01; chi < 50.0; chi *= 1.2) {
            const auto f = poisson_averages(chi, tau);
            EXPECT_LE(f.f1, prev.f1) << tau << " " << chi;
            EXPECT_LE(f.f2, prev.f2) << tau << " " << chi;
            EXPECT_GE(f.f1, 0.0);
            EXPECT_GE(f.f2, 0.0);
            prev = f;
        }
    }
}

TEST(PoissonAverages, ContinuousAtZero) {
    const auto at0 = poisson_averages(0.0, 0.7);
    const auto near0 = poisson_averages(1e-12, 0.7);
    EXPECT_NEAR(at0.f1, near0.f1, 1e-10);
    EXPECT_NEAR(at0.f2, near0.f2, 1e-10);
}

TEST(PoissonAverages, RejectsBadInput) {
    EXPECT_THROW(poisson_averages(-1.0, 1.0), DomainError);
    EXPECT_THROW(poisson_averages(1.0, 0.0), DomainError);
    EXPECT_THROW(poisson_averages(std::nan(""), 1.0), DomainError);
    EXPECT_THROW(poisson_averages(1.0, 1.0, 0.0), DomainError);
}

TEST(SoftThreshold, Examples) {
    EXPECT_EQ(soft_threshold(2.0, 1.0, 1.0), 1.0);
    EXPECT_EQ(soft_threshold(-0.5, 1.0, 1.0), 0.0);
    EXPECT_EQ(soft_threshold(-3.0, 1.0, 2.0), -1.0);
    EXPECT_EQ(soft_threshold(1.0, 1.0, 1.0), 0.0);
}

TEST(GaussSoftMoments, PointMass) {
    const auto m = gauss_soft_moments(2.0, 0.0, 1.0, 1.0);
    EXPECT_EQ(m.mass, 1.0);
    EXPECT_EQ(m.m1, 1.0);
    EXPECT_EQ(m.m2, 1.0);
    const auto inside = gauss_soft_moments(0.5, 0.0, 1.0, 1.0);
    EXPECT_EQ(inside.mass, 0.0);
    EXPECT_EQ(inside.m1, 0.0);
}

TEST(GaussSoftMoments, NoThreshold) {
    const auto m = gauss_soft_moments(0.0, 1.0, 0.0, 1.0);
    EXPECT_NEAR(m.mass, 1.0, 1e-15);
    EXPECT_NEAR(m.m1, 0.0, 1e-15);
    EXPECT_NEAR(m.m2, 1.0, 1e-15);
}

TEST(GaussSoftMoments, GoldenSymmetricCase) {
    const auto m = gauss_soft_moments(0.0, 1.0, 1.0, 1.0);
    EXPECT_NEAR(m.mass, 0.31731050786291410283, 1e-14);
    EXPECT_NEAR(m.m1, 0.0, 1e-15);
    EXPECT_NEAR(m.m2, 0.15067956668754150606, 1e-14);
}

TEST(GaussSoftMoments, AgreesWithQuadratureOnRandomPoints) {
    Draws draws(2024);
    for (int k = 0; k < 1000; ++k) {
        const double B = draws.uniform(-10.0, 10.0);
        const double C = 25.0 * (1.0 - draws.uniform(0.0, 1.0));
        const double lambda = draws.uniform(0.0, 5.0);
        const double A = 10.0 * (1.0 - draws.uniform(0.0, 1.0));
        const auto got = gauss_soft_moments(B, C, lambda, A);
        const auto want = quadrature_soft_moments(B, C, lambda, A);
        ASSERT_NEAR(got.mass, want.mass, 1e-10) << B << " " << C << " " << lambda << " " << A;
        ASSERT_NEAR(got.m1, want.m1, 1e-10) << B << " " << C << " " << lambda << " " << A;
        ASSERT_NEAR(got.m2, want.m2, 1e-10) << B << " " << C << " " << lambda << " " << A;
    }
}

TEST(GaussSoftMoments, ParityUnderReflection) {
    Draws draws(5);
    for (int k = 0; k < 500; ++k) {
        const double B = draws.uniform(-8.0, 8.0);
        const double C = draws.uniform(1e-3, 10.0);
        const double lambda = draws.uniform(0.0, 4.0);
        const double A = draws.uniform(0.1, 5.0);
        const auto plus = gauss_soft_moments(B, C, lambda, A);
        const auto minus = gauss_soft_moments(-B, C, lambda, A);
        EXPECT_NEAR(plus.mass, minus.mass, 1e-14);
        EXPECT_NEAR(plus.m1, -minus.m1, 1e-13);
        EXPECT_NEAR(plus.m2, minus.m2, 1e-13);
    }
}

TEST(GaussSoftMoments, VarianceNonNegative) {
    Draws draws(6);
    for (int k = 0; k < 1000; ++k) {
        const auto m = gauss_soft_moments(draws.uniform(-20, 20), draws.uniform(0, 5),
                                          draws.uniform(0, 5), draws.uniform(0.01, 3));
        EXPECT_GE(m.m2 - m.m1 * m.m1, -1e-12);
        EXPECT_GE(m.mass, 0.0);
        EXPECT_LE(m.mass, 1.0);
    }
}

TEST(GaussSoftMoments, InfinitePenaltyKillsEverything) {
    const auto m = gauss_soft_moments(3.0, 2.0, std::numeric_limits<double>::infinity(), 1.0);
    EXPECT_EQ(m.mass, 0.0);
    EXPECT_EQ(m.m1, 0.0);
    EXPECT_EQ(m.m2, 0.0);
}

TEST(GaussSoftMoments, RejectsBadInput) {
    EXPECT_THROW(gauss_soft_moments(0.0, -1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(gauss_soft_moments(0.0, 1.0, -1.0, 1.0), DomainError);
    EXPECT_THROW(gauss_soft_moments(0.0, 1.0, 1.0, 0.0), DomainError);
}

TEST(PenaltyMixture, Atoms) {
    const PenaltyMixture mix(1.0, 0.5, 0.3);
    const auto atoms = mix.atoms();
    EXPECT_EQ(atoms[0].lambda, 2.0);
    EXPECT_EQ(atoms[0].weight, 0.3);
    EXPECT_EQ(atoms[1].lambda, 1.0);
    EXPECT_DOUBLE_EQ(atoms[0].weight + atoms[1].weight, 1.0);
    EXPECT_THROW(PenaltyMixture(1.0, 0.0, 0.5), ConfigError);
    EXPECT_THROW(PenaltyMixture(1.0, 1.5, 0.5), ConfigError);
    EXPECT_THROW(PenaltyMixture(-1.0, 0.5, 0.5), ConfigError);
    EXPECT_THROW(PenaltyMixture(1.0, 0.5, 1.5), ConfigError);
}

TEST(PenaltyAverage, Examples) {
    auto id = [](double lam) { return lam; };
    EXPECT_EQ(penalty_average(PenaltyMixture(2.0, 1.0, 0.7), id), 2.0);
    EXPECT_DOUBLE_EQ(penalty_average(PenaltyMixture(1.0, 0.5, 0.5), id), 1.5);
    const double mass = penalty_average(PenaltyMixture(1.0, 0.5, 0.5), [](double lam) {
        return gauss_soft_moments(0.0, 1.0, lam, 1.0).mass;
    });
    // (P(|z| > 2) + P(|z| > 1)) / 2 at 40 digits.
    EXPECT_NEAR(mass, 0.18140538587963625862, 1e-14);
}

TEST(PenaltyAverage, DegenerateMixtureIgnoresWeight) {
    Draws draws(8);
    for (int k = 0; k < 100; ++k) {
        const double lambda = draws.uniform(0.0, 3.0);
        const double p_w = draws.uniform(0.0, 1.0);
        auto g = [](double lam) { return std::sin(lam) + lam * lam; };
        EXPECT_EQ(penalty_average(PenaltyMixture(lambda, 1.0, p_w), g), g(lambda));
    }
}

TEST(AveragedSoftMoments, MatchesAtomWiseAverage) {
    const PenaltyMixture mix(0.8, 0.4, 0.25);
    const auto got = averaged_soft_moments(0.3, 1.7, mix, 2.0);
    const auto a = gauss_soft_moments(0.3, 1.7, 2.0, 2.0);
    const auto b = gauss_soft_moments(0.3, 1.7, 0.8, 2.0);
    EXPECT_NEAR(got.mass, 0.25 * a.mass + 0.75 * b.mass, 1e-15);
    EXPECT_NEAR(got.m1, 0.25 * a.m1 + 0.75 * b.m1, 1e-15);
    EXPECT_NEAR(got.m2, 0.25 * a.m2 + 0.75 * b.m2, 1e-15);
}

}  // namespace
}  // namespace ampr
