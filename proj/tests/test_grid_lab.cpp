// SPDX-License-Identifier: MIT
#include "ilab/csp_profile.hpp"
#include "ilab/grid_lab.hpp"
#include "test_support.hpp"

#include <cmath>

namespace ilab {
namespace {

using testing::expect_code;

const GradientInput kNone1{GradientTermSpec::none(Operator::L1)};
const GradientInput kNone0{GradientTermSpec::none(Operator::L0)};

// Shooting oracle for (u')^2 u'' = u^3, u(1) = 0, u(2) = 1: RK4 on (u, u') with bisection on u'(1).
double shoot(double slope, std::size_t steps, std::vector<double>* out = nullptr) {
    auto rhs = [](double u, double v) { return std::pair{v, u * u * u / (v * v)}; };
    double u = 0.0, v = slope;
    const double h = 1.0 / static_cast<double>(steps);
    if (out) out->assign(1, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto [a1, b1] = rhs(u, v);
        const auto [a2, b2] = rhs(u + 0.5 * h * a1, v + 0.5 * h * b1);
        const auto [a3, b3] = rhs(u + 0.5 * h * a2, v + 0.5 * h * b2);
        const auto [a4, b4] = rhs(u + h * a3, v + h * b3);
        u += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
        v += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        if (out) out->push_back(u);
    }
    return u;
}

TEST(Solve, LinearProfileForZeroAbsorption) {
    for (auto op : {Operator::L1, Operator::L0}) {
        const auto r = solve_radial_dirichlet(MonotoneFunction::zero(), op == Operator::L1 ? kNone1 : kNone0, op,
                                              {1.0, 2.0, 64}, 0.0, 1.0);
        EXPECT_TRUE(r.report.converged);
        for (std::size_t i = 0; i < r.u.size(); ++i) EXPECT_NEAR(r.u.values[i], r.u.coordinate(i) - 1.0, 1e-14);
    }
}

TEST(Solve, CubicAbsorptionMatchesShootingOracle) {
    const std::size_t n = 1024, sub = 16;
    double lo = 1e-3, hi = 2.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        const double mid = 0.5 * (lo + hi);
        (shoot(mid, n * sub) > 1.0 ? hi : lo) = mid;
    }
    std::vector<double> oracle;
    shoot(0.5 * (lo + hi), n * sub, &oracle);
    const auto r = solve_radial_dirichlet(MonotoneFunction::power_law(3.0, 1.0), kNone1, Operator::L1,
                                          {1.0, 2.0, n}, 0.0, 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i <= n; ++i) err = std::max(err, std::abs(r.u.values[i] - oracle[i * sub]));
    EXPECT_LE(err, 1e-4);
}

TEST(Solve, ZeroBoundaryGivesZeroSolution) {
    const auto r = solve_radial_dirichlet(MonotoneFunction::power_law(1.0, 5.0), kNone1, Operator::L1, {1.0, 2.0, 32},
                                          0.0, 0.0);
    for (double v : r.u.values) EXPECT_EQ(v, 0.0);
}

TEST(Solve, BoundaryRespectAndNonnegativity) {
    for (double q : {0.5, 1.0, 3.0}) {
        const auto r = solve_radial_dirichlet(MonotoneFunction::power_law(q, 50.0), kNone1, Operator::L1,
                                              {1.0, 2.0, 128}, 0.0, 1.0);
        EXPECT_EQ(r.u.values.front(), 0.0);
        EXPECT_EQ(r.u.values.back(), 1.0);
        for (double v : r.u.values) EXPECT_GE(v, 0.0);
        EXPECT_EQ(r.report.converged, r.report.final_update_norm <= r.report.tolerance);
    }
}

TEST(Solve, IterationCapCarriesTheLastIterate) {
    SolverConfig cfg;
    cfg.max_iterations = 1;
    try {
        solve_radial_dirichlet(MonotoneFunction::power_law(1.0, 100.0), kNone1, Operator::L1, {1.0, 2.0, 256}, 0.0,
                               1.0, cfg);
        FAIL() << "expected ConvergenceFailure";
    } catch (const SolveFailure& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConvergenceFailure);
        EXPECT_EQ(e.last_iterate().size(), 257u);
        EXPECT_FALSE(e.report().converged);
        EXPECT_EQ(e.report().iterations, 1);
    }
}

TEST(Solve, BoxWithLinearDataIsExact) {
    const BoxGeometry box{0.0, 1.0, 0.0, 1.0, 16, 16};
    const auto r = solve_box_dirichlet(MonotoneFunction::zero(), kNone1, Operator::L1, box,
                                       [](double x, double) { return x; });
    EXPECT_TRUE(r.report.converged);
    for (std::size_t k = 0; k < r.u.size(); ++k) {
        const std::size_t nx = r.u.nx_nodes();
        EXPECT_NEAR(r.u.values[k], static_cast<double>(k % nx) / 16.0, 1e-7);
    }
}

TEST(Comparison, ConstantsSatisfyHypothesesAndConclusion) {
    const auto f = MonotoneFunction::power_law(1.0, 1.0);
    const IntervalGeometry geom{1.0, 2.0, 32};
    auto u = GridFunction::interval(geom);
    auto v = GridFunction::interval(geom);
    const double eps = 0.01;
    std::fill(v.values.begin(), v.values.end(), eps);
    v.fix(0, eps);
    v.fix(32, eps);
    const auto rep = discrete_comparison_check(
        u, v, [](std::size_t) { return 0.0; }, [&](std::size_t) { return -f.value(eps); }, f, kNone1, Operator::L1);
    EXPECT_TRUE(rep.hypotheses_hold);
    EXPECT_TRUE(rep.conclusion_holds);
    EXPECT_NEAR(rep.realized_gap, eps, 1e-15);
}

TEST(Comparison, LiftedDeadcoreSupersolutionDominates) {
    const auto cmp = lifted_deadcore_comparison(MonotoneFunction::power_law(1.0, 100.0), Operator::L1);
    EXPECT_TRUE(cmp.report.hypotheses_hold);
    EXPECT_TRUE(cmp.report.conclusion_holds);
    EXPECT_GT(cmp.report.realized_gap, 0.0);
    for (std::size_t i = 0; i < cmp.v.size(); ++i) EXPECT_GE(cmp.v.values[i], cmp.u.u.values[i]);
}

TEST(Comparison, LoweredNodeIsReportedExactly) {
    LiftedComparisonSetup setup;
    setup.lowered_node = 300;
    const auto cmp = lifted_deadcore_comparison(MonotoneFunction::power_law(1.0, 100.0), Operator::L1, setup);
    EXPECT_FALSE(cmp.report.conclusion_holds);
    ASSERT_TRUE(cmp.report.conclusion_violation.has_value());
    EXPECT_EQ(cmp.report.conclusion_violation->node, 300u);
    EXPECT_EQ(cmp.report.conclusion_violations, 1u);
}

TEST(Comparison, GeometryMismatchIsAUsageError) {
    const auto u = GridFunction::interval({1.0, 2.0, 16});
    const auto v = GridFunction::interval({1.0, 2.0, 32});
    expect_code(ErrorCode::Usage, [&] {
        discrete_comparison_check(
            u, v, [](std::size_t) { return 0.0; }, [](std::size_t) { return -1.0; }, MonotoneFunction::zero(),
            kNone1, Operator::L1);
    });
}

TEST(DeadCoreDetection, Examples) {
    const IntervalGeometry geom{1.0, 2.0, 64};
    auto zero = GridFunction::interval(geom);
    EXPECT_DOUBLE_EQ(detect_dead_core(zero, 1e-12).width, 1.0);

    auto lin = GridFunction::interval(geom);
    for (std::size_t i = 0; i < lin.size(); ++i) lin.values[i] = lin.coordinate(i) - 1.0;
    const auto core = detect_dead_core(lin, 1e-12);
    EXPECT_EQ(core.width, 0.0);
    EXPECT_EQ(core.nodes, std::vector<std::size_t>{0});
}

TEST(DeadCoreDetection, CompactSolutionCoreHasWidthDelta) {
    CspConfig cfg;
    const auto f = MonotoneFunction::power_law(1.0, 1.0);
    const auto pipe = run_csp_pipeline(f, cfg);
    ASSERT_TRUE(pipe.assembled.has_value());
    const double delta = pipe.psi.delta;
    const std::size_t n = 512;
    auto u = GridFunction::interval({1.0, 1.0 + 2.0 * delta, n});
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.coordinate(i);
        u.values[i] = r >= 1.0 + delta ? 0.0 : pipe.assembled->profile.value_at(r);
    }
    const auto core = detect_dead_core(u, 1e-12);
    EXPECT_NEAR(core.width, delta, u.h);
}

TEST(Experiment, DichotomyAtFullResolution) {
    const auto reports = run_experiment_sweep({{1.0, 100.0, Operator::L1, 1024}, {3.0, 1.0, Operator::L1, 1024}});
    ASSERT_EQ(reports.size(), 2u);
    EXPECT_EQ(reports[0].spec.q, 1.0);
    EXPECT_EQ(reports[0].classification.verdict, Verdict::Converges);
    EXPECT_GE(reports[0].dead_core_width, 0.1);
    EXPECT_EQ(reports[1].classification.verdict, Verdict::Diverges);
    EXPECT_EQ(reports[1].dead_core_width, 0.0);
    EXPECT_GT(reports[1].midpoint_value, 1e-4);
    EXPECT_GT(reports[0].dead_core_width, reports[1].dead_core_width);
    EXPECT_DOUBLE_EQ(reports[0].threshold, reports[0].h * reports[0].h);
}

TEST(Experiment, WidthIsStableUnderRefinement) {
    const auto coarse = smp_csp_experiment({1.0, 100.0, Operator::L1, 512});
    const auto fine = smp_csp_experiment({1.0, 100.0, Operator::L1, 1024});
    EXPECT_LE(std::abs(coarse.dead_core_width - fine.dead_core_width), 2.0 * fine.h);
}

TEST(Experiment, RejectsNonpositiveParameters) {
    expect_code(ErrorCode::Usage, [] { smp_csp_experiment({0.0, 1.0, Operator::L1, 64}); });
}

}  // namespace
}  // namespace ilab
