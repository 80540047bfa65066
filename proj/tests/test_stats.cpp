#include "ifm/stats.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

using namespace ifm;

TEST(IncompleteBeta, UniformCaseIsIdentity) {
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.999, 1.0}) {
        EXPECT_NEAR(regularized_incomplete_beta(1.0, 1.0, x), x, 1e-15);
    }
}

TEST(IncompleteBeta, SymmetricCaseAtOneHalf) {
    EXPECT_NEAR(regularized_incomplete_beta(2.0, 2.0, 0.5), 0.5, 1e-15);
}

// Reference values from 40-digit quadrature (mpmath.betainc).
TEST(IncompleteBeta, MatchesHighPrecisionReference) {
    EXPECT_NEAR(regularized_incomplete_beta(2.0, 3.0, 0.3), 0.3483, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(2.5, 0.5, 0.7), 0.20311066372005495, 1e-12);
    EXPECT_NEAR(regularized_incomplete_beta(50.0, 51.0, 0.01) / 6.1650157123029196e-72, 1.0, 1e-10);
}

TEST(IncompleteBeta, InverseRoundTrips) {
    for (double a : {0.5, 1.0, 3.0, 40.0}) {
        for (double b : {0.7, 2.0, 25.0}) {
            for (double p : {0.001, 0.025, 0.3, 0.5, 0.975, 0.999}) {
                const double x = inverse_regularized_incomplete_beta(a, b, p);
                EXPECT_NEAR(regularized_incomplete_beta(a, b, x), p, 1e-8) << a << " " << b << " " << p;
            }
        }
    }
}

TEST(IncompleteBeta, DomainErrors) {
    EXPECT_THROW(regularized_incomplete_beta(0.0, 1.0, 0.5), std::domain_error);
    EXPECT_THROW(regularized_incomplete_beta(1.0, -1.0, 0.5), std::domain_error);
    EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, 1.5), std::domain_error);
    EXPECT_THROW(inverse_regularized_incomplete_beta(1.0, 1.0, -0.1), std::domain_error);
}

TEST(ChiSquaredQuantile, TwoDegreesOfFreedomIsExponential) {
    EXPECT_NEAR(chi_squared_quantile(0.975, 2), -2.0 * std::log(0.025), 1e-8 * 7.3778);
    EXPECT_NEAR(chi_squared_quantile(0.975, 2), 7.3778, 1e-4);
    EXPECT_NEAR(chi_squared_quantile(0.5, 2), 1.3863, 1e-4);
    EXPECT_NEAR(chi_squared_quantile(0.5, 2), 2.0 * std::log(2.0), 1e-8 * 1.3863);
}

TEST(ChiSquaredQuantile, OddDegreesAgainstReference) {
    // Root of the regularized lower gamma function at 40 digits.
    EXPECT_NEAR(chi_squared_quantile(0.975, 7) / 16.012764274629324, 1.0, 1e-8);
}

TEST(ChiSquaredQuantile, EdgesAndErrors) {
    EXPECT_EQ(chi_squared_quantile(0.0, 3), 0.0);
    EXPECT_LT(chi_squared_quantile(1e-12, 2), 1e-11);
    EXPECT_THROW(chi_squared_quantile(1.0, 2), std::domain_error);
    EXPECT_THROW(chi_squared_quantile(0.5, 0), std::domain_error);
}

TEST(NormalQuantile, NinetySevenPointFivePercent) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
}

TEST(ClopperPearson, SingleFailure) {
    const Interval ci = clopper_pearson(0, 1, 0.95);
    EXPECT_EQ(ci.lower, 0.0);
    EXPECT_NEAR(ci.upper, 0.975, 1e-12);
}

TEST(ClopperPearson, AllSuccessesHaveUpperOne) {
    for (std::uint64_t m : {1U, 5U, 100U}) {
        const Interval ci = clopper_pearson(m, m, 0.95);
        EXPECT_EQ(ci.upper, 1.0);
        EXPECT_NEAR(ci.lower, std::pow(0.025, 1.0 / static_cast<double>(m)), 1e-12);
    }
}

TEST(ClopperPearson, HalfOfHundredAgainstTailSums) {
    const Interval ci = clopper_pearson(50, 100, 0.95);
    // Bisection on exact binomial tails at 40 digits.
    EXPECT_NEAR(ci.lower, 0.39832112950330100, 1e-12);
    EXPECT_NEAR(ci.upper, 0.60167887049669900, 1e-12);
    const auto [lo, hi] = oracle::clopper_pearson_by_tails(3, 17, 0.95);
    const Interval ci3 = clopper_pearson(3, 17, 0.95);
    EXPECT_NEAR(ci3.lower, 0.037985068070625974, 1e-12);
    EXPECT_NEAR(ci3.upper, 0.43431787284428394, 1e-12);
    EXPECT_NEAR(lo, ci3.lower, 1e-10);
    EXPECT_NEAR(hi, ci3.upper, 1e-10);
}

TEST(ClopperPearson, AgreesWithTailSumOracleEverywhereUpTo200) {
    for (std::uint64_t m = 1; m <= 200; ++m) {
        for (std::uint64_t k = 0; k <= m; ++k) {
            const Interval ci = clopper_pearson(k, m, 0.95);
            const auto [lo, hi] = oracle::clopper_pearson_by_tails(k, m, 0.95);
            ASSERT_NEAR(ci.lower, lo, 1e-8) << k << "/" << m;
            ASSERT_NEAR(ci.upper, hi, 1e-8) << k << "/" << m;
        }
    }
}

TEST(ClopperPearson, WidthShrinksWithTrialsAtFixedRatio) {
    for (double ratio : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        double previous = 2.0;
        for (std::uint64_t m = 10; m <= 10000; m *= 10) {
            const auto k = static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(m)));
            const double w = clopper_pearson(k, m).width();
            EXPECT_LE(w, previous) << ratio << " " << m;
            previous = w;
        }
    }
}

TEST(ClopperPearson, Errors) {
    EXPECT_THROW(clopper_pearson(0, 0), std::invalid_argument);
    EXPECT_THROW(clopper_pearson(3, 2), std::invalid_argument);
    EXPECT_THROW(clopper_pearson(1, 2, 1.0), std::invalid_argument);
}

TEST(PoissonInterval, ZeroCount) {
    const Interval ci = poisson_interval(0, 0.95);
    EXPECT_EQ(ci.lower, 0.0);
    EXPECT_NEAR(ci.upper, -std::log(0.025), 1e-10);
    EXPECT_NEAR(ci.upper, 3.6889, 1e-4);
}

TEST(PoissonInterval, ChiSquaredDefinition) {
    for (std::uint64_t k : {1U, 5U, 40U}) {
        const Interval ci = poisson_interval(k, 0.95);
        EXPECT_NEAR(ci.lower, chi_squared_quantile(0.025, static_cast<int>(2 * k)) / 2.0, 1e-9);
        EXPECT_NEAR(ci.upper, chi_squared_quantile(0.975, static_cast<int>(2 * k + 2)) / 2.0, 1e-9);
    }
}

TEST(PoissonInterval, NormalLimit) {
    const double k = 1e4;
    const double w = poisson_interval(10000, 0.95).width();
    EXPECT_NEAR(w / std::sqrt(k) / (2.0 * 1.96), 1.0, 0.02);
}

// Lower and upper ends use k and k + 1, so the interval shrinks to the gap
// between the two gamma medians rather than to a point.
TEST(PoissonInterval, SmallCoverageLeavesUnitGap) {
    const Interval ci = poisson_interval(100, 1e-6);
    EXPECT_NEAR(ci.width(), 1.0, 1e-2);
    EXPECT_TRUE(ci.contains(100.0));
}

TEST(NormalWidth, Values) {
    EXPECT_NEAR(normal_width_binomial(0.5, 9604, 0.95), 0.02, 1e-5);
    EXPECT_EQ(normal_width_binomial(0.0, 100, 0.95), 0.0);
    EXPECT_NEAR(normal_width_binomial(0.5, 1, 0.95), 1.96, 1e-3);
    EXPECT_NEAR(normal_width_binomial(0.5, 1, 0.95), normal_quantile(0.975), 1e-15);
}
