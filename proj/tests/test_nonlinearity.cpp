// SPDX-License-Identifier: MIT
#include "ilab/nonlinearity.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace ilab {
namespace {

using testing::expect_code;

const auto G0_L1 = GradientTermSpec::none(Operator::L1);
const auto G0_L0 = GradientTermSpec::none(Operator::L0);

MonotoneFunction sample_table() {
    std::vector<double> s, f;
    for (int i = 0; i <= 10; ++i) {
        s.push_back(0.1 * i);
        f.push_back(0.1 * i);
    }
    return MonotoneFunction::table(s, f);
}

TEST(Primitive, PowerLawIsExact) {
    EXPECT_NEAR(eval_F(MonotoneFunction::power_law(2.0, 1.0), 1.0), 1.0 / 3.0, 1e-15);
}

TEST(Primitive, VanishesAtZero) {
    EXPECT_EQ(eval_F(MonotoneFunction::power_law(1.5, 2.0), 0.0), 0.0);
    EXPECT_EQ(eval_F(sample_table(), 0.0), 0.0);
    EXPECT_EQ(eval_F(MonotoneFunction::zero(), 0.0), 0.0);
}

TEST(Primitive, TableMatchesTrapezoidOracle) {
    EXPECT_NEAR(eval_F(sample_table(), 1.0), 0.5, 1e-12);
}

TEST(Primitive, OutsideTheCapIsADomainError) {
    const auto f = MonotoneFunction::power_law(1.0, 1.0, 2.0);
    expect_code(ErrorCode::Domain, [&] { eval_F(f, 3.0); });
    expect_code(ErrorCode::Domain, [&] { eval_F(f, -1.0); });
}

TEST(Primitive, PiecewiseIsContinuousAcrossBreakpoints) {
    const auto f = MonotoneFunction::piecewise({{0.0, 1.0, 1.0}, {0.5, 2.0, 3.0}});
    EXPECT_NEAR(f.value(0.5), 0.5, 1e-15);
    EXPECT_NEAR(f.value(0.5 + 1e-9), 0.5, 1e-8);
    // F(1) = 1/8 + 0.5 * 0.5 + 3 * 0.5^3 / 3
    EXPECT_NEAR(eval_F(f, 1.0), 0.125 + 0.25 + 0.125, 1e-14);
}

TEST(Table, RejectsNonMonotoneSamples) {
    expect_code(ErrorCode::InvariantViolation, [] { MonotoneFunction::table({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}); });
    expect_code(ErrorCode::InvariantViolation, [] { MonotoneFunction::table({0.0, 1.0}, {0.5, 1.0}); });
}

TEST(Gamma, Examples) {
    EXPECT_NEAR(eval_Gamma(G0_L1, 1.0), 0.25, 1e-15);
    EXPECT_NEAR(eval_Gamma(GradientTermSpec{MonotoneFunction::power_law(1.0, 1.0), Operator::L1}, 1.0), 2.25,
                1e-14);
    EXPECT_NEAR(eval_Gamma(G0_L0, 2.0), 2.0, 1e-15);
}

TEST(Gamma, InverseExamples) {
    EXPECT_NEAR(invert_Gamma(G0_L1, 0.25), 1.0, 1e-14);
    EXPECT_NEAR(invert_Gamma(G0_L1, 4.0), 2.0, 1e-14);
    const GradientTermSpec g{MonotoneFunction::power_law(3.0, 1.0), Operator::L1};
    EXPECT_EQ(invert_Gamma(g, 0.0), 0.0);
    EXPECT_EQ(invert_Gamma(G0_L0, 0.0), 0.0);
    expect_code(ErrorCode::Domain, [&] { invert_Gamma(g, -1.0); });
}

TEST(Gamma, RoundTripOnSampledValues) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logy(-12.0, 3.0);
    for (const auto& g : {G0_L1, G0_L0, GradientTermSpec{MonotoneFunction::power_law(3.0, 1.0), Operator::L1},
                          GradientTermSpec{MonotoneFunction::power_law(0.5, 2.0), Operator::L0}}) {
        for (int k = 0; k < 200; ++k) {
            const double y = std::pow(10.0, logy(rng));
            EXPECT_NEAR(eval_Gamma(g, invert_Gamma(g, y)), y, 1e-10 * y);
        }
    }
}

TEST(Monotonicity, PrimitiveAndGammaIncrease) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const auto f = MonotoneFunction::power_law(2.5, 1.5);
    const GradientTermSpec g{MonotoneFunction::power_law(1.0, 1.0), Operator::L1};
    for (int k = 0; k < 500; ++k) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        EXPECT_LE(eval_F(f, a), eval_F(f, b));
        if (a > 0.0) {
            EXPECT_LT(eval_Gamma(g, a), eval_Gamma(g, b));
        }
    }
}

TEST(Subhomogeneity, HoldsOnRandomPairs) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(0.0, 1.0), ut(0.0, 1.0);
    const std::vector<MonotoneFunction> specs{
        MonotoneFunction::power_law(0.5, 1.0), MonotoneFunction::power_law(3.0, 2.0), sample_table(),
        MonotoneFunction::piecewise({{0.0, 1.0, 1.0}, {0.3, 0.5, 2.0}})};
    for (const auto& f : specs) {
        for (int k = 0; k < 1000; ++k) {
            const double a = ua(rng), t = ut(rng);
            EXPECT_LE(eval_F(f, a * t), a * eval_F(f, t) + 1e-15);
        }
    }
}

TEST(Classifier, Examples) {
    const auto q3 = classify_integral(MonotoneFunction::power_law(3.0, 1.0), IntegrandSelector::inverse_root(4.0));
    EXPECT_EQ(q3.verdict, Verdict::Diverges);
    EXPECT_TRUE(std::isinf(q3.integral));

    const auto q1 = classify_integral(MonotoneFunction::power_law(1.0, 1.0), IntegrandSelector::inverse_root(4.0));
    EXPECT_EQ(q1.verdict, Verdict::Converges);
    EXPECT_NEAR(q1.exponent, 0.5, 1e-6);
    // int_0^1 (s^2/2)^(-1/4) ds = 2^(1/4) * 2
    EXPECT_NEAR(q1.integral, 2.0 * std::pow(2.0, 0.25), 1e-7);

    EXPECT_EQ(classify_integral(MonotoneFunction::power_law(1.0, 1.0), IntegrandSelector::inverse_root(2.0)).verdict,
              Verdict::Diverges);
}

TEST(Classifier, DichotomyLadderMatchesTheExponentRule) {
    for (double p : {2.0, 4.0}) {
        for (double q : {0.5, 1.0, 2.0, 2.5, 3.5, 4.0}) {
            const bool critical = std::abs((q + 1.0) / p - 1.0) < 1e-12;
            const auto r = classify_integral(MonotoneFunction::power_law(q, 1.0), IntegrandSelector::inverse_root(p));
            if (critical) {
                EXPECT_NE(r.verdict, Verdict::Converges) << "q=" << q << " p=" << p;
            } else {
                EXPECT_EQ(r.verdict, (q + 1.0) / p >= 1.0 ? Verdict::Diverges : Verdict::Converges)
                    << "q=" << q << " p=" << p;
            }
        }
    }
}

TEST(Classifier, ConvergentVerdictCarriesAFinitePositiveIntegral) {
    const auto r = classify_integral(MonotoneFunction::power_law(0.5, 3.0), IntegrandSelector::inverse_root(2.0));
    ASSERT_EQ(r.verdict, Verdict::Converges);
    EXPECT_TRUE(std::isfinite(r.integral));
    EXPECT_GT(r.integral, 0.0);
    EXPECT_LE(r.band.first, r.integral);
    EXPECT_GE(r.band.second, r.integral);
}

TEST(Classifier, FunctionVanishingOnAnIntervalDivergesWithFlag) {
    const auto f = MonotoneFunction::piecewise({{0.0, 1.0, 0.0}, {0.25, 1.0, 1.0}});
    const auto r = classify_integral(f, IntegrandSelector::inverse_root(4.0));
    EXPECT_EQ(r.verdict, Verdict::Diverges);
    EXPECT_TRUE(r.zero_on_interval);
}

TEST(Classifier, GammaInverseGaugeFollowsTheGradientTerm) {
    // G = 0: 1/Gamma^-1(F) = (4F)^(-1/4), same verdict as F^(-1/4)
    const auto f1 = MonotoneFunction::power_law(1.0, 1.0);
    EXPECT_EQ(classify_integral(f1, IntegrandSelector::gamma_inverse(G0_L1)).verdict, Verdict::Converges);
    // G(s) = s: Gamma ~ 2t^2 near 0, so 1/Gamma^-1(F) ~ c/s
    const GradientTermSpec lin{MonotoneFunction::power_law(1.0, 1.0), Operator::L1};
    EXPECT_NE(classify_integral(f1, IntegrandSelector::gamma_inverse(lin)).verdict, Verdict::Converges);
}

TEST(Classifier, ScaledGaugeAgreesWithUnscaledOnTheLadder) {
    for (double q : {0.5, 1.0, 2.0, 2.5, 3.5}) {
        for (const auto& g : {G0_L1, GradientTermSpec{MonotoneFunction::power_law(3.0, 1.0), Operator::L1}}) {
            const auto f = MonotoneFunction::power_law(q, 1.0);
            EXPECT_EQ(classify_integral(f, IntegrandSelector::gamma_inverse(g, 1.0)).verdict,
                      classify_integral(f, IntegrandSelector::gamma_inverse(g, 0.25)).verdict)
                << "q=" << q;
        }
    }
}

TEST(Classifier, RejectsBadDelta) {
    expect_code(ErrorCode::Domain, [] {
        classify_integral(MonotoneFunction::power_law(1.0, 1.0), IntegrandSelector::inverse_root(4.0), 0.0);
    });
}

}  // namespace
}  // namespace ilab
