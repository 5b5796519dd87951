// SPDX-License-Identifier: MIT
#include "ilab/csp_profile.hpp"
#include "ilab/numerics.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

namespace ilab {
namespace {

using testing::expect_code;

const auto kLinear = MonotoneFunction::power_law(1.0, 1.0);
const double kRoot8 = 2.0 * std::sqrt(2.0);

TEST(SupportRadius, LinearAbsorptionClosedForm) {
    const auto s = compute_support_radius(kLinear, 0.125);
    EXPECT_NEAR(s.R, kRoot8, 1e-6);
    EXPECT_EQ(s.phi.values.front(), 1.0);
    EXPECT_EQ(s.phi.values.back(), 0.0);
    EXPECT_EQ(s.phi.first_derivative.back(), 0.0);
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
        const double r = s.phi.grid[i];
        const double x = 1.0 - r / kRoot8;
        EXPECT_NEAR(s.phi.values[i], x * x, 1e-6) << r;
        EXPECT_NEAR(s.phi.second_derivative[i], 0.25, 1e-6) << r;
    }
    const auto rep = residual_report(ResidualTarget::ComparisonProfileOde, s.phi, kLinear,
                                     GradientTermSpec::none(Operator::L1), Operator::L1, {.tolerance = 1e-6});
    EXPECT_TRUE(rep.pass) << rep.max_abs_residual;
}

TEST(SupportRadius, StrictlyDecreasingForOtherAbsorptions) {
    for (double q : {0.5, 2.0}) {
        const auto s = compute_support_radius(MonotoneFunction::power_law(q, 1.0), 0.125);
        EXPECT_TRUE(std::isfinite(s.R));
        for (std::size_t i = 1; i < s.phi.size(); ++i) EXPECT_LT(s.phi.values[i], s.phi.values[i - 1]);
    }
}

TEST(SupportRadius, DivergentConditionIsRejected) {
    expect_code(ErrorCode::DivergentIntegral,
                [] { compute_support_radius(MonotoneFunction::power_law(3.0, 1.0), 0.125); });
    expect_code(ErrorCode::DivergentIntegral,
                [] { compute_support_radius(MonotoneFunction::power_law(1.0, 1.0), 0.125, Operator::L0); });
}

TEST(Psi, VanishingDampingMatchesTheQuadraticClosedForm) {
    CspConfig cfg;
    cfg.K = 1e-8;
    cfg.delta = 1.0;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    const auto rep = build_psi(kLinear, cfg, s.R, s.phi);
    EXPECT_NEAR(rep.psi.value_at(s.R - 1.0), 0.353553, 1e-4);
    for (std::size_t i = 0; i < rep.psi.size(); ++i) {
        const double x = s.R - rep.psi.grid[i];
        EXPECT_NEAR(rep.psi.values[i], x * x / kRoot8, 1e-4);
    }
}

TEST(Psi, TerminalConditionsAndMembership) {
    CspConfig cfg;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    const auto rep = build_psi(kLinear, cfg, s.R, s.phi);
    EXPECT_EQ(rep.psi.values.back(), 0.0);
    EXPECT_LE(std::abs(rep.psi.first_derivative.back()), kGluingTolerance);
    EXPECT_NEAR(rep.delta, std::log(8.0) / 3.0, 1e-12);
    EXPECT_FALSE(rep.delta_shrunk);
    EXPECT_TRUE(rep.first_step_dominates);
    EXPECT_GE(rep.min_domination_gap, -cfg.invariant_tolerance);
    EXPECT_LE(rep.sup_norm, 1.0);
    EXPECT_NEAR(rep.lipschitz_bound, std::cbrt(6.0 * 0.5 * rep.delta), 1e-12);

    // Lipschitz membership over every node pair; the max over adjacent pairs bounds all pairs.
    const auto& g = rep.psi.grid;
    const auto& v = rep.psi.values;
    for (std::size_t i = 0; i < v.size(); i += 37)
        for (std::size_t j = i + 1; j < v.size(); j += 41)
            EXPECT_LE(std::abs(v[i] - v[j]), (rep.lipschitz_bound + 1e-6) * (g[j] - g[i]));
    for (std::size_t i = 1; i < v.size(); ++i)
        EXPECT_LE(std::abs(v[i] - v[i - 1]), (rep.lipschitz_bound + 1e-6) * (g[i] - g[i - 1]));

    // psi >= phi nodewise
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_GE(v[i], s.phi.value_at(g[i]) - cfg.invariant_tolerance);
}

TEST(Psi, ResidualAndRungeKuttaReintegration) {
    CspConfig cfg;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    const auto rep = build_psi(kLinear, cfg, s.R, s.phi);
    const auto res = residual_report(ResidualTarget::CspOde, rep.psi, kLinear, cfg.K, Operator::L1,
                                     {.tolerance = 1e-6, .kappa = cfg.kappa});
    EXPECT_TRUE(res.pass);
    EXPECT_LE(res.max_abs_residual, 1e-6);

    // Forward RK4 for w = (psi')^3: w' = 3K w + 6 h(psi), h = 4 kappa f.
    const auto& g = rep.psi.grid;
    double psi = rep.psi.values.front();
    double w = std::pow(rep.psi.first_derivative.front(), 3);
    auto rhs = [&](double p, double ww) {
        return std::pair{std::cbrt(ww), 3.0 * cfg.K * ww + 6.0 * 4.0 * cfg.kappa * kLinear.value(std::max(p, 0.0))};
    };
    const int sub = 8;
    double err = 0.0;
    const std::size_t stop = g.size() * 3 / 4;
    for (std::size_t i = 1; i < stop; ++i) {
        const double hs = (g[i] - g[i - 1]) / sub;
        for (int k = 0; k < sub; ++k) {
            const auto [a1, b1] = rhs(psi, w);
            const auto [a2, b2] = rhs(psi + 0.5 * hs * a1, w + 0.5 * hs * b1);
            const auto [a3, b3] = rhs(psi + 0.5 * hs * a2, w + 0.5 * hs * b2);
            const auto [a4, b4] = rhs(psi + hs * a3, w + hs * b3);
            psi += hs / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
            w += hs / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
        err = std::max(err, std::abs(psi - rep.psi.values[i]));
    }
    EXPECT_LE(err, 1e-5);
}

TEST(Psi, OneMapApplicationPreservesDomination) {
    CspConfig cfg;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    const double delta = default_csp_delta(cfg, csp_sup_h(kLinear, cfg.kappa), s.R);
    const auto t = numerics::linspace(s.R - delta, s.R, 513);
    std::vector<double> phi(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) phi[i] = s.phi.value_at(t[i]);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> amp(0.0, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> g(t.size());
        const double a = amp(rng), b = amp(rng);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double x = s.R - t[i];
            g[i] = phi[i] + a * x + b * x * x;
        }
        cfg.delta = delta;
        const auto tg = apply_csp_map(kLinear, cfg, t, g);
        for (std::size_t i = 0; i < t.size(); ++i) EXPECT_GE(tg[i], phi[i] - 1e-9) << "trial " << trial;
    }
}

TEST(Psi, DeltaViolatingTheKernelBoundIsRejected) {
    CspConfig cfg;
    cfg.delta = 1.0;  // ln 8 / 3 < 1
    expect_code(ErrorCode::InvariantViolation, [&] { cfg.validate(); });
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    expect_code(ErrorCode::InvariantViolation, [&] { build_psi(kLinear, cfg, s.R, s.phi); });
}

TEST(Psi, IterationCapRaisesConvergenceFailure) {
    CspConfig cfg;
    cfg.max_iterations = 2;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    expect_code(ErrorCode::ConvergenceFailure, [&] { build_psi(kLinear, cfg, s.R, s.phi); });
}

TEST(CompactSolution, AssemblyAtUnitDamping) {
    CspConfig cfg;
    const auto s = compute_support_radius(kLinear, cfg.kappa);
    const auto rep = build_psi(kLinear, cfg, s.R, s.phi);
    const auto sol = assemble_compact_solution(rep.psi, cfg, s.R, kLinear);
    const double delta = std::log(8.0) / 3.0;
    EXPECT_NEAR(sol.r_circ, kRoot8 - delta - 1.0, 1e-6);
    EXPECT_NEAR(sol.r_circ, 1.1353, 1e-4);
    EXPECT_NEAR(sol.profile.value_at(1.0), rep.psi.values.front(), 1e-12);
    EXPECT_EQ(*sol.profile.support_edge, 1.0 + rep.delta);
    EXPECT_LE(std::abs(sol.profile.value_at(1.0 + rep.delta)), kGluingTolerance);
    EXPECT_LE(std::abs(sol.profile.slope_at(1.0 + rep.delta)), kGluingTolerance);
    EXPECT_TRUE(sol.viscosity_clause.holds);
    EXPECT_TRUE(sol.residual.pass) << sol.residual.max_abs_residual;
    EXPECT_TRUE(sol.supersolution.pass);

    const double mid = 1.0 + rep.delta / 2.0;
    const auto at_mid = residual_report(ResidualTarget::CompactSolution, sol.profile, kLinear, cfg.K, Operator::L1,
                                        {.tolerance = 1e-6, .lo = mid - 1e-3, .hi = mid + 1e-3});
    ASSERT_FALSE(at_mid.residuals.empty());
    EXPECT_LE(at_mid.max_abs_residual, 1e-6);
}

TEST(CompactSolution, ShortSupportIsAGeometryError) {
    CspConfig cfg;
    const auto f = MonotoneFunction::power_law(1.0, 100.0);
    const auto s = compute_support_radius(f, cfg.kappa);
    EXPECT_LT(s.R, 1.0);
    const auto rep = build_psi(f, cfg, s.R, s.phi);
    expect_code(ErrorCode::Geometry, [&] { assemble_compact_solution(rep.psi, cfg, s.R, f); });
    const auto pipe = run_csp_pipeline(f, cfg);
    EXPECT_FALSE(pipe.assembled.has_value());
    EXPECT_FALSE(pipe.geometry_error.empty());
}

TEST(Pipeline, BothOperatorsPass) {
    CspConfig cfg;
    const auto l1 = run_csp_pipeline(kLinear, cfg);
    EXPECT_TRUE(l1.pass);
    EXPECT_NEAR(l1.support_radius, kRoot8, 1e-6);

    cfg.op = Operator::L0;
    const auto l0 = run_csp_pipeline(MonotoneFunction::power_law(0.5, 1.0), cfg);
    EXPECT_TRUE(l0.psi_residual.pass) << l0.psi_residual.max_abs_residual;
    EXPECT_TRUE(l0.psi.first_step_dominates);
    EXPECT_LE(l0.psi.lipschitz_constant, l0.psi.lipschitz_bound + cfg.lipschitz_slack);
}

}  // namespace
}  // namespace ilab
