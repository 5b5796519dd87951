// SPDX-License-Identifier: MIT
#include "ilab/csp_profile.hpp"
#include "ilab/deadcore.hpp"
#include "ilab/numerics.hpp"
#include "ilab/radial_ops.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

namespace ilab {
namespace {

using testing::expect_code;

Profile smooth(std::vector<double> grid, double a, double b, double c) {
    // a + b r + c r^2
    return Profile::from_function(
        std::move(grid), [=](double r) { return a + b * r + c * r * r; }, [=](double r) { return b + 2.0 * c * r; },
        [=](double) { return 2.0 * c; });
}

TEST(RadialOperator, ExponentialMatchesHandCalculation) {
    const auto p = Profile::from_function(
        numerics::linspace(0.0, 2.0, 21), [](double r) { return std::exp(r); }, [](double r) { return std::exp(r); },
        [](double r) { return std::exp(r); });
    EXPECT_NEAR(apply_operator_radial(Operator::L1, p, 1.0), std::exp(3.0), 1e-12);
    EXPECT_NEAR(apply_operator_radial(Operator::L1, p, 1.0), 20.0855, 1e-4);
}

TEST(RadialOperator, LinearProfileIsAnnihilated) {
    const auto p = smooth(numerics::linspace(0.0, 3.0, 31), 0.0, 1.0, 0.0);
    for (double r : {0.1, 0.4, 1.7, 2.9}) {
        EXPECT_EQ(apply_operator_radial(Operator::L1, p, r), 0.0);
        EXPECT_EQ(apply_operator_radial(Operator::L0, p, r), 0.0);
    }
}

TEST(RadialOperator, SquareAtOne) {
    const auto p = smooth(numerics::linspace(0.0, 2.0, 21), 0.0, 0.0, 1.0);
    EXPECT_NEAR(apply_operator_radial(Operator::L1, p, 1.0), 8.0, 1e-12);
}

TEST(RadialOperator, NormalizedOperatorRefusesCriticalPoints) {
    const auto p = smooth(numerics::linspace(-1.0, 1.0, 21), 0.0, 0.0, 1.0);
    expect_code(ErrorCode::CriticalPoint, [&] { apply_operator_radial(Operator::L0, p, 0.0); });
    EXPECT_NO_THROW(apply_operator_radial(Operator::L1, p, 0.0));
}

TEST(RadialOperator, ConsistencyBetweenOperatorsOffCriticalPoints) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), pos(0.05, 0.95);
    for (int k = 0; k < 200; ++k) {
        const auto p = smooth(numerics::linspace(0.0, 1.0, 11), coef(rng), coef(rng), coef(rng));
        const double r = pos(rng);
        const double slope = p.slope_at(r);
        if (std::abs(slope) < 1e-6) continue;
        EXPECT_NEAR(apply_operator_radial(Operator::L1, p, r),
                    slope * slope * apply_operator_radial(Operator::L0, p, r), 1e-12);
    }
}

TEST(RadialOperator, LinearInSecondDerivativeForFixedSlope) {
    // Same slope at r = 0.5, curvatures c1, c2 and c1 + c2.
    auto with = [](double c) {
        return Profile::from_function(
            numerics::linspace(0.0, 1.0, 11), [](double r) { return r; }, [](double) { return 1.7; },
            [c](double) { return c; });
    };
    const double c1 = 0.3, c2 = -1.1;
    const double sum = apply_operator_radial(Operator::L1, with(c1 + c2), 0.5);
    EXPECT_NEAR(sum, apply_operator_radial(Operator::L1, with(c1), 0.5) + apply_operator_radial(Operator::L1, with(c2), 0.5),
                1e-14);
    EXPECT_NEAR(apply_operator_radial(Operator::L1, with(4.0 * c1), 0.5),
                4.0 * apply_operator_radial(Operator::L1, with(c1), 0.5), 1e-14);
}

TEST(Residual, ZeroProfileHasZeroResidualForEveryEqualityTarget) {
    const auto grid = numerics::linspace(0.0, 1.0, 41);
    const auto zero = Profile::from_samples(grid, std::vector<double>(grid.size(), 0.0));
    const auto f = MonotoneFunction::power_law(1.0, 1.0);
    for (auto target : {ResidualTarget::ComparisonProfileOde, ResidualTarget::CompactSolution}) {
        const auto rep = residual_report(target, zero, f, GradientTermSpec::none(Operator::L1), Operator::L1);
        EXPECT_TRUE(rep.pass);
        EXPECT_EQ(rep.max_abs_residual, 0.0);
    }
    const auto csp = residual_report(ResidualTarget::CspOde, zero, f, 1.0, Operator::L1);
    EXPECT_EQ(csp.max_abs_residual, 0.0);
}

TEST(Residual, DeadcoreProfileSatisfiesTheInequalityInClosedForm) {
    const auto f = MonotoneFunction::power_law(1.0, 1.0);
    const auto g = GradientTermSpec::none(Operator::L1);
    const auto phi = build_deadcore_profile(f, g, 2.0);
    const auto rep = residual_report(ResidualTarget::DeadcoreInequality, phi, f, g, Operator::L1);
    EXPECT_TRUE(rep.pass);
    for (std::size_t k = 0; k < rep.grid.size(); ++k) {
        const double t = rep.grid[k];
        EXPECT_LE(rep.residuals[k], 0.0);
        EXPECT_NEAR(rep.residuals[k], -t * t / (16.0 * std::sqrt(2.0)), 1e-9);
    }
}

TEST(Residual, NearlyUndampedPsiSatisfiesItsOde) {
    const auto f = MonotoneFunction::power_law(1.0, 1.0);
    CspConfig cfg;
    cfg.K = 1e-8;
    cfg.delta = 1.0;
    const auto support = compute_support_radius(f, cfg.kappa);
    const auto psi = build_psi(f, cfg, support.R, support.phi);
    const auto rep = residual_report(ResidualTarget::CspOde, psi.psi, f, cfg.K, Operator::L1,
                                     {.tolerance = 1e-6, .kappa = cfg.kappa});
    EXPECT_TRUE(rep.pass) << rep.max_abs_residual;
    EXPECT_LE(rep.max_abs_residual, 1e-6);
}

TEST(Residual, UnknownTargetIsAUsageError) {
    expect_code(ErrorCode::Usage, [] { parse_target("not_a_target"); });
    EXPECT_EQ(parse_target("csp_profile_ode"), ResidualTarget::CspOde);
}

TEST(Counterexample, Examples) {
    EXPECT_NEAR(counterexample_eval(0.5, 1.0), 2.0 * std::exp(3.0) - std::exp(1.5), 1e-12);
    EXPECT_NEAR(counterexample_eval(0.5, 1.0), 35.6894, 1e-3);
    for (double a : {0.1, 0.5, 0.9}) EXPECT_EQ(counterexample_eval(a, 0.0), 1.0);
}

TEST(Counterexample, MinimumIsPositive) {
    for (double a : {0.1, 0.5, 0.9}) {
        const auto scan = counterexample_scan(a, 10.0, 10000);
        EXPECT_GT(scan.min_value, 0.0);
        EXPECT_EQ(scan.argmin, 0.0);
    }
}

TEST(Kink, NonzeroEdgeSlopeIsReportedAsSlopeMismatch) {
    const auto grid = numerics::linspace(0.0, 2.0, 201);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::max(0.0, 0.01 * (1.0 - grid[i]));
    auto p = Profile::from_samples(grid, v);
    p.support_edge = 1.0;
    const auto rep = kink_viscosity_check(p, MonotoneFunction::power_law(1.0, 1.0));
    EXPECT_FALSE(rep.holds);
    EXPECT_FALSE(rep.slope_vanishes);
    EXPECT_TRUE(rep.value_vanishes);
    EXPECT_EQ(rep.failing_condition, "slope mismatch at the support edge");
}

TEST(Kink, QuadraticContactHolds) {
    auto p = Profile::from_function(
        numerics::linspace(0.0, 2.0, 201), [](double r) { return r < 1.0 ? (1.0 - r) * (1.0 - r) : 0.0; },
        [](double r) { return r < 1.0 ? -2.0 * (1.0 - r) : 0.0; }, [](double r) { return r < 1.0 ? 2.0 : 0.0; });
    p.support_edge = 1.0;
    EXPECT_TRUE(kink_viscosity_check(p, MonotoneFunction::power_law(1.0, 1.0)).holds);
}

TEST(Kink, MissingEdgeDoesNotHold) {
    const auto p = smooth(numerics::linspace(0.0, 1.0, 11), 0.0, 0.0, 1.0);
    const auto rep = kink_viscosity_check(p, MonotoneFunction::power_law(1.0, 1.0));
    EXPECT_FALSE(rep.holds);
}

}  // namespace
}  // namespace ilab
