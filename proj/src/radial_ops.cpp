// SPDX-License-Identifier: MIT
#include "ilab/radial_ops.hpp"

#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ilab {

double gradient_term(const GradientInput& g, Operator op, double slope) {
    const double a = std::abs(slope);
    if (const auto* K = std::get_if<double>(&g)) {
        return op == Operator::L1 ? *K * a * a * a : *K * a;
    }
    const auto& spec = std::get<GradientTermSpec>(g);
    if (spec.term.identically_zero()) return 0.0;
    return spec.term.value(a);
}

namespace {

double op_value(Operator op, double d1, double d2) { return op == Operator::L1 ? d1 * d1 * d2 : d2; }

double K_of(const GradientInput& g, ResidualTarget t) {
    if (const auto* K = std::get_if<double>(&g)) return *K;
    raise(ErrorCode::Usage, std::string("target ") + identifier(t) + " needs a scalar K");
}

}  // namespace

double apply_operator_radial(Operator op, const Profile& profile, double r, double critical_threshold) {
    if (!(r > profile.front() && r < profile.back())) {
        raise(ErrorCode::Domain, "radial operator needs r strictly inside the profile grid");
    }
    const double d1 = profile.slope_at(r);
    const double d2 = profile.curvature_at(r);
    if (op == Operator::L0 && std::abs(d1) <= critical_threshold) {
        raise(ErrorCode::CriticalPoint,
              "normalized operator at a critical point; use kink_viscosity_check");
    }
    return op_value(op, d1, d2);
}

const char* to_string(SignMode m) {
    switch (m) {
        case SignMode::Equality: return "equality";
        case SignMode::NonPositive: return "<=0";
        case SignMode::NonNegative: return ">=0";
    }
    return "equality";
}

const char* identifier(ResidualTarget t) {
    switch (t) {
        case ResidualTarget::BarrierOde: return "barrier_ode";
        case ResidualTarget::StrictSubsolution: return "strict_subsolution";
        case ResidualTarget::DeadcoreInequality: return "deadcore_inequality";
        case ResidualTarget::AnnulusSupersolution: return "annulus_supersolution";
        case ResidualTarget::ComparisonProfileOde: return "comparison_profile_ode";
        case ResidualTarget::CspOde: return "csp_profile_ode";
        case ResidualTarget::CompactSolution: return "compact_solution";
        case ResidualTarget::AbsorptionSupersolution: return "absorption_supersolution";
    }
    return "unknown";
}

ResidualTarget parse_target(const std::string& id) {
    for (auto t : {ResidualTarget::BarrierOde, ResidualTarget::StrictSubsolution,
                   ResidualTarget::DeadcoreInequality, ResidualTarget::AnnulusSupersolution,
                   ResidualTarget::ComparisonProfileOde, ResidualTarget::CspOde,
                   ResidualTarget::CompactSolution, ResidualTarget::AbsorptionSupersolution}) {
        if (id == identifier(t)) return t;
    }
    raise(ErrorCode::Usage, "unknown residual target '" + id + "'");
}

SignMode default_sign_mode(ResidualTarget t) {
    switch (t) {
        case ResidualTarget::StrictSubsolution: return SignMode::NonNegative;
        case ResidualTarget::DeadcoreInequality:
        case ResidualTarget::AnnulusSupersolution:
        case ResidualTarget::AbsorptionSupersolution: return SignMode::NonPositive;
        default: return SignMode::Equality;
    }
}

void ResidualReport::add_violation(Violation v) { violations.push_back(std::move(v)); }

void ResidualReport::finalize() {
    max_abs_residual = 0.0;
    max_violation = -std::numeric_limits<double>::infinity();
    worst_node = nodes.empty() ? 0 : nodes.front();
    worst_location = grid.empty() ? 0.0 : grid.front();
    for (std::size_t k = 0; k < residuals.size(); ++k) {
        const double r = residuals[k];
        const double v = sign_mode == SignMode::Equality      ? std::abs(r)
                         : sign_mode == SignMode::NonPositive ? r
                                                              : -r;
        max_abs_residual = std::max(max_abs_residual, std::abs(r));
        if (v > max_violation) {
            max_violation = v;
            worst_node = nodes[k];
            worst_location = grid[k];
        }
    }
    if (residuals.empty()) max_violation = 0.0;
    pass = max_violation <= tolerance && violations.empty() && std::isfinite(max_abs_residual);
    if (!violations.empty()) {
        worst_node = violations.front().node;
        worst_location = violations.front().location;
    }
}

ResidualReport residual_report(ResidualTarget target, const Profile& profile,
                               const NonlinearitySpec& f, const GradientInput& g, Operator op,
                               const ResidualOptions& options) {
    if (profile.size() < 3) raise(ErrorCode::Usage, "residual needs a profile with >= 3 nodes");
    ResidualReport rep;
    rep.target = identifier(target);
    rep.tolerance = options.tolerance;
    rep.sign_mode = options.sign_mode.value_or(default_sign_mode(target));

    const double lo = options.lo.value_or(profile.front());
    const double hi = options.hi.value_or(profile.back());
    const double kappa = options.kappa;

    for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
        const double r = profile.grid[i];
        if (r < lo || r > hi) continue;
        const double p = profile.values[i];
        const double d1 = profile.first_derivative[i];
        const double d2 = profile.second_derivative[i];
        // f is extended by zero below 0 (barrier profiles cross zero at their root)
        const double fp = f.value(std::clamp(p, 0.0, f.domain_cap()));
        double res = 0.0;
        switch (target) {
            case ResidualTarget::BarrierOde: {
                const double K = K_of(g, target);
                res = op == Operator::L1 ? 3.0 * d1 * d1 * d2 + K * d1 * d1 * d1 - fp + options.alpha
                                         : d2 + K * d1 - fp + options.alpha;
                break;
            }
            case ResidualTarget::CspOde: {
                const double K = K_of(g, target);
                res = op == Operator::L1 ? d1 * d1 * d2 - K * d1 * d1 * d1 - 8.0 * kappa * fp
                                         : d2 - K * d1 - 8.0 * kappa * fp;
                break;
            }
            default: {
                if (op == Operator::L0 && d1 == 0.0) {
                    ++rep.critical_nodes_skipped;
                    continue;
                }
                const double L = op_value(op, d1, d2);
                const double G = gradient_term(g, op, d1);
                switch (target) {
                    case ResidualTarget::StrictSubsolution: res = L - G - fp + options.alpha; break;
                    case ResidualTarget::DeadcoreInequality:
                    case ResidualTarget::AnnulusSupersolution: res = L + G - 0.5 * fp; break;
                    case ResidualTarget::ComparisonProfileOde: res = L - kappa * fp; break;
                    case ResidualTarget::CompactSolution: res = L + G - fp; break;
                    case ResidualTarget::AbsorptionSupersolution: res = L - fp; break;
                    default: break;
                }
            }
        }
        rep.grid.push_back(r);
        rep.nodes.push_back(i);
        rep.residuals.push_back(res);
    }
    rep.finalize();
    return rep;
}

double counterexample_eval(double alpha, double r) {
    if (!(alpha > 0.0 && alpha < 1.0)) raise(ErrorCode::Domain, "counterexample needs 0 < alpha < 1");
    if (!(r >= 0.0)) raise(ErrorCode::Domain, "counterexample needs r >= 0");
    return 2.0 * std::exp(3.0 * r) - std::exp(3.0 * alpha * r);
}

CounterexampleScan counterexample_scan(double alpha, double r_max, std::size_t nodes) {
    if (nodes < 2 || !(r_max > 0.0)) raise(ErrorCode::Usage, "scan needs >= 2 nodes and r_max > 0");
    CounterexampleScan scan{alpha, r_max, nodes, std::numeric_limits<double>::infinity(), 0.0};
    for (double r : numerics::linspace(0.0, r_max, nodes)) {
        const double v = counterexample_eval(alpha, r);
        if (v < scan.min_value) {
            scan.min_value = v;
            scan.argmin = r;
        }
    }
    return scan;
}

KinkReport kink_viscosity_check(const Profile& profile, const NonlinearitySpec& f, double tolerance) {
    KinkReport rep;
    rep.tolerance = tolerance;
    if (!profile.support_edge) {
        rep.failing_condition = "profile has no support edge";
        return rep;
    }
    const double e = *profile.support_edge;
    rep.edge = e;
    if (e < profile.front() || e > profile.back()) {
        rep.failing_condition = "support edge outside the profile grid";
        return rep;
    }
    rep.edge_value = profile.value_at(e);
    rep.edge_slope = profile.slope_at(e);

    double left_max = 0.0, right_max = 0.0;
    bool has_left = false, has_right = false;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double r = profile.grid[i];
        const double a = std::abs(profile.values[i]);
        if (r < e - 1e-14 * std::max(1.0, std::abs(e))) {
            has_left = true;
            left_max = std::max(left_max, a);
        } else if (r > e + 1e-14 * std::max(1.0, std::abs(e))) {
            has_right = true;
            right_max = std::max(right_max, a);
        }
    }
    // the zero extension lives on whichever side is flat
    if (has_left && has_right) {
        rep.zero_side_max = std::min(left_max, right_max);
    } else {
        rep.zero_side_max = 0.0;
    }

    rep.value_vanishes = std::abs(rep.edge_value) <= tolerance;
    rep.slope_vanishes = std::abs(rep.edge_slope) <= tolerance;
    const double v = std::clamp(rep.edge_value, 0.0, f.domain_cap());
    rep.absorption_vanishes = f.value(v) <= tolerance;
    const bool flat_side = rep.zero_side_max <= tolerance;

    if (!rep.value_vanishes) {
        rep.failing_condition = "value mismatch at the support edge";
    } else if (!rep.slope_vanishes) {
        rep.failing_condition = "slope mismatch at the support edge";
    } else if (!rep.absorption_vanishes) {
        rep.failing_condition = "absorption term nonzero at the support edge";
    } else if (!flat_side) {
        rep.failing_condition = "profile is not identically zero beyond the support edge";
    }
    rep.holds = rep.failing_condition.empty();
    return rep;
}

}  // namespace ilab
