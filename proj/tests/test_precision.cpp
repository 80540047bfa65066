#include "ifm/core_sim.hpp"
#include "ifm/precision.hpp"
#include "ifm/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace ifm;

TEST(SignalDerivative, ClassicalIsExactlyOne) {
    for (double a : {0.0, 0.3, 0.5, 0.99, 1.0}) {
        const SignalSlope s = signal_derivative(a, 1, Signal::classical_transmission);
        EXPECT_EQ(s.value, 1.0);
        EXPECT_FALSE(s.near_zero);
    }
}

TEST(SignalDerivative, MatchesSecantOfDenseSweep) {
    std::vector<double> grid;
    for (int i = 0; i <= 1000; ++i) grid.push_back(i * 1e-3);
    const auto sweep = probability_sweep(10, grid);
    const double secant = (sweep[501].p_r - sweep[499].p_r) / 2e-3;
    const SignalSlope s = signal_derivative(0.5, 10, Signal::reference);
    EXPECT_NEAR(s.value, secant, 1e-4 * std::abs(secant));
    EXPECT_FALSE(s.unstable);
    EXPECT_FALSE(s.one_sided);
}

TEST(SignalDerivative, PlateauIsFlaggedNearZero) {
    // N = 20000 keeps P_R close to 1 over most of the range.
    const SignalSlope s = signal_derivative(0.2, 20000, Signal::reference);
    EXPECT_LT(std::abs(s.value), kNearZeroSlope);
    EXPECT_TRUE(s.near_zero);
}

TEST(SignalDerivative, EndpointsAreOneSided) {
    EXPECT_TRUE(signal_derivative(0.0, 10, Signal::reference).one_sided);
    EXPECT_TRUE(signal_derivative(1.0, 10, Signal::reference).one_sided);
    EXPECT_TRUE(signal_derivative(0.99995, 10, Signal::sample).one_sided);
}

TEST(SignalDerivative, SignalsSumToMinusLossSlope) {
    const double r = signal_derivative(0.7, 20, Signal::reference).value;
    const double s = signal_derivative(0.7, 20, Signal::sample).value;
    const double l = signal_derivative(0.7, 20, Signal::loss).value;
    EXPECT_NEAR(r + s + l, 0.0, 1e-7);
}

TEST(NormalBinomial, ClassicalHalf) {
    EXPECT_NEAR(expected_loss_normal_binomial(0.5, 0.01, Signal::classical_transmission, 1, 0.95),
                0.5 * 0.25 * std::pow(2.0 * normal_quantile(0.975), 2) / 1e-4, 1e-6);
}

TEST(NormalBinomial, PaperRoundedQuantile) {
    // With 2z rounded to 3.92 the value is 0.5 * 0.25 * 392^2.
    const double exact = expected_loss_normal_binomial(0.5, 0.01, Signal::classical_transmission, 1);
    EXPECT_NEAR(exact / 19208.0, 1.0, 1e-4);
}

TEST(NormalBinomial, OpaqueAndTransparentEdges) {
    EXPECT_EQ(expected_loss_normal_binomial(1.0, 0.01, Signal::classical_transmission, 1), 0.0);
    EXPECT_THROW(expected_loss_normal_binomial(0.0, 0.01, Signal::classical_transmission, 1), std::domain_error);
}

TEST(NormalBinomial, QuadraticInInverseUncertainty) {
    const double a = expected_loss_normal_binomial(0.6, 0.01, Signal::reference, 30);
    const double b = expected_loss_normal_binomial(0.6, 0.005, Signal::reference, 30);
    EXPECT_NEAR(b / a, 4.0, 1e-12);
}

TEST(NormalPoisson, ClassicalHalfIsTwiceBinomial) {
    const double p = expected_loss_normal_poisson(0.5, 0.01, Signal::classical_transmission, 1);
    const double b = expected_loss_normal_binomial(0.5, 0.01, Signal::classical_transmission, 1);
    EXPECT_NEAR(p / 38416.0, 1.0, 1e-4);
    EXPECT_NEAR(p / b, 2.0, 1e-12);
}

TEST(NormalPoisson, SmallSignalMatchesBinomial) {
    const double p = expected_loss_normal_poisson(0.002, 0.001, Signal::classical_transmission, 1);
    const double b = expected_loss_normal_binomial(0.002, 0.001, Signal::classical_transmission, 1);
    EXPECT_NEAR(p / b, 1.0 / (1.0 - 0.002), 1e-12);
}

TEST(NormalPoisson, RatioToBinomialDivergesTowardsTransparent) {
    double previous = 0.0;
    for (double a : {0.9, 0.99, 0.999}) {
        const double ratio = expected_loss_normal_poisson(a, 0.01, Signal::classical_transmission, 1) /
                             expected_loss_normal_binomial(a, 0.01, Signal::classical_transmission, 1);
        EXPECT_NEAR(ratio, 1.0 / (1.0 - a), 1e-9 / (1.0 - a));
        EXPECT_GT(ratio, previous);
        previous = ratio;
    }
    EXPECT_THROW(expected_loss_normal_poisson(0.0, 0.01, Signal::classical_transmission, 1), std::domain_error);
}

TEST(ClopperPearsonLoss, ClassicalAtZeroIsFinite) {
    const LossBudget b = expected_loss_clopper_pearson(0.0, 0.01, Signal::classical_transmission, 1);
    EXPECT_TRUE(std::isfinite(b.m_required));
    EXPECT_FALSE(b.flags.unbounded);
    EXPECT_EQ(b.p_loss, 1.0);
    EXPECT_EQ(b.expected_lost, b.m_required);
    // k = 0 gives width 1 - 0.025^(1/M); the smallest M with width <= 0.01.
    EXPECT_EQ(b.m_required, std::ceil(std::log(0.025) / std::log1p(-0.01)));
}

TEST(ClopperPearsonLoss, MinimalityOfM) {
    const LossBudget b = expected_loss_clopper_pearson(0.4, 0.01, Signal::classical_transmission, 1);
    const auto m = static_cast<std::uint64_t>(b.m_required);
    auto width = [](std::uint64_t trials) {
        const auto k = static_cast<std::uint64_t>(std::llround(0.4 * static_cast<double>(trials)));
        return clopper_pearson(k, trials).width();
    };
    EXPECT_LE(width(m), 0.01);
    EXPECT_GT(width(m - 1), 0.01);
    EXPECT_NEAR(b.expected_lost, b.m_required * 0.6, 1e-9 * b.expected_lost);
}

TEST(ClopperPearsonLoss, AgreesWithNormalApproximationInBulk) {
    for (double a : {0.3, 0.5, 0.7}) {
        const LossBudget cp = expected_loss_clopper_pearson(a, 0.01, Signal::classical_transmission, 1);
        const double normal = expected_loss_normal_binomial(a, 0.01, Signal::classical_transmission, 1);
        ASSERT_GE(cp.m_required, 1e3);
        EXPECT_NEAR(cp.expected_lost / normal, 1.0, 0.25) << a;
    }
    const LossBudget ifm_cp = expected_loss_clopper_pearson(0.5, 0.01, Signal::reference, 10);
    ASSERT_GE(ifm_cp.signal, 0.2);
    ASSERT_LE(ifm_cp.signal, 0.8);
    EXPECT_NEAR(ifm_cp.expected_lost / expected_loss_normal_binomial(0.5, 0.01, Signal::reference, 10), 1.0, 0.25);
}

TEST(ClopperPearsonLoss, QuadraticScaling) {
    for (Signal s : {Signal::classical_transmission, Signal::reference}) {
        for (double a : {0.2, 0.5, 0.8}) {
            const double full = expected_loss_clopper_pearson(a, 0.01, s, 50).expected_lost;
            const double half = expected_loss_clopper_pearson(a, 0.005, s, 50).expected_lost;
            EXPECT_GE(half / full, 3.5);
            EXPECT_LE(half / full, 4.5);
        }
    }
}

TEST(ClopperPearsonLoss, SampleSignalNeverBeatsClassical) {
    for (int n : {10, 100}) {
        for (double a = 0.05; a < 0.96; a += 0.1) {
            const LossBudget sample = expected_loss_clopper_pearson(a, 0.01, Signal::sample, n);
            const LossBudget classical = expected_loss_clopper_pearson(a, 0.01, Signal::classical_transmission, n);
            EXPECT_GE(sample.expected_lost, classical.expected_lost) << "N=" << n << " alpha=" << a;
        }
    }
}

TEST(ClopperPearsonLoss, FlatSignalIsFlagged) {
    const LossBudget b = expected_loss_clopper_pearson(0.2, 0.01, Signal::reference, 20000);
    EXPECT_TRUE(b.flags.near_zero_slope);
    EXPECT_TRUE(b.flags.any());
}

TEST(ClopperPearsonLoss, WorstCaseIsNotCheaper) {
    for (double a : {0.1, 0.5, 0.9}) {
        const double expected = expected_loss_clopper_pearson(a, 0.01, Signal::classical_transmission, 1).m_required;
        const double worst = expected_loss_clopper_pearson(a, 0.01, Signal::classical_transmission, 1, 0.95,
                                                           CountMode::worst_case).m_required;
        EXPECT_GE(worst, expected);
    }
}

TEST(ClopperPearsonLoss, RejectsBadInput) {
    EXPECT_THROW(expected_loss_clopper_pearson(0.5, 0.0, Signal::classical_transmission, 1), std::invalid_argument);
    EXPECT_THROW(expected_loss_clopper_pearson(1.5, 0.01, Signal::classical_transmission, 1), std::invalid_argument);
    EXPECT_THROW(expected_loss_clopper_pearson(0.5, 0.01, Signal::reference, 0), std::invalid_argument);
}

TEST(PoissonChi2Loss, NeverBelowBinomial) {
    for (Signal s : {Signal::classical_transmission, Signal::reference}) {
        for (double a = 0.05; a < 0.96; a += 0.15) {
            const LossBudget p = expected_loss_poisson_chi2(a, 0.01, s, 100);
            const LossBudget b = expected_loss_clopper_pearson(a, 0.01, s, 100);
            if (p.flags.unbounded || b.flags.unbounded) continue;
            EXPECT_GE(p.expected_lost, b.expected_lost) << to_string(s) << " alpha=" << a;
        }
    }
}

TEST(PoissonChi2Loss, MatchesNormalApproximation) {
    const LossBudget p = expected_loss_poisson_chi2(0.5, 0.01, Signal::classical_transmission, 1);
    EXPECT_NEAR(p.expected_lost / 38416.0, 1.0, 0.02);
}

TEST(PoissonChi2Loss, LossSignalRejected) {
    EXPECT_THROW(expected_loss_poisson_chi2(0.5, 0.01, Signal::loss, 10), std::invalid_argument);
}

TEST(LossCurve, SinglePointMatchesDirectCall) {
    LossCurveSpec spec;
    spec.signal = Signal::classical_transmission;
    const std::vector<double> grid{0.5};
    const auto rows = loss_curve(spec, grid);
    ASSERT_EQ(rows.size(), 1U);
    const LossBudget direct = expected_loss_clopper_pearson(0.5, 0.01, Signal::classical_transmission, 100);
    EXPECT_EQ(rows[0].m_required, direct.m_required);
    EXPECT_EQ(rows[0].expected_lost, direct.expected_lost);
}

TEST(LossCurve, ThreadCountDoesNotChangeRows) {
    LossCurveSpec spec;
    spec.signal = Signal::reference;
    spec.n = 10;
    spec.statistics = CountStatistics::poisson;
    std::vector<double> grid;
    for (int i = 1; i < 20; ++i) grid.push_back(i * 0.05);
    const auto one = loss_curve(spec, grid);
    spec.threads = 3;
    const auto three = loss_curve(spec, grid);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].alpha, grid[i]);
        EXPECT_EQ(one[i].expected_lost, three[i].expected_lost);
    }
}

TEST(LossCurve, ErrorsPropagateFromWorkers) {
    LossCurveSpec spec;
    spec.signal = Signal::loss;
    spec.statistics = CountStatistics::poisson;
    spec.threads = 2;
    const std::vector<double> grid{0.2, 0.4};
    EXPECT_THROW(loss_curve(spec, grid), std::invalid_argument);
}

TEST(Parsing, SignalAndStatisticsNames) {
    EXPECT_EQ(parse_signal("reference"), Signal::reference);
    EXPECT_EQ(parse_signal("classical"), Signal::classical_transmission);
    EXPECT_EQ(parse_statistics("poisson"), CountStatistics::poisson);
    EXPECT_FALSE(parse_signal("bogus").has_value());
    EXPECT_EQ(to_string(Signal::sample), "sample");
}
