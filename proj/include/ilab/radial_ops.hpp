// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"
#include "ilab/profile.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ilab {

/// Either a gradient term G(|Du|) or the pure power K|Du|^3 (L1) / K|Du| (L0).
using GradientInput = std::variant<GradientTermSpec, double>;

/// G(|slope|) or K|slope|^m for the operator.
double gradient_term(const GradientInput& g, Operator op, double slope);

/// Radial form of the operator at r: (phi')^2 phi'' for L1, phi'' for L0.
/// L0 refuses points where phi' vanishes (CriticalPointError); those are the
/// business of kink_viscosity_check.
double apply_operator_radial(Operator op, const Profile& profile, double r,
                             double critical_threshold = 0.0);

enum class SignMode { Equality, NonPositive, NonNegative };
const char* to_string(SignMode m);

/// Radial (in)equalities the artifacts are checked against. With p the
/// profile, op(p) its radial operator, G the gradient input and h = 4 kappa f:
enum class ResidualTarget {
    BarrierOde,               // ((p')^3)' + K (p')^3 - f(p) + alpha = 0   (L0: p'' + K p' - f + alpha)
    StrictSubsolution,        // op(p) - G(|p'|) - f(p) >= 0
    DeadcoreInequality,       // op(p) + G(|p'|) - f(p)/2 <= 0, in the profile variable t
    AnnulusSupersolution,     // same expression on the assembled radial function
    ComparisonProfileOde,     // op(p) - h(p)/4 = 0
    CspOde,                   // (p')^2 p'' - K (p')^3 - 2 h(p) = 0   (L0: p'' - K p' - 2h)
    CompactSolution,          // op(p) + G(|p'|) - f(p) = 0
    AbsorptionSupersolution,  // op(p) - f(p) <= 0
};

const char* identifier(ResidualTarget t);
ResidualTarget parse_target(const std::string& id);
SignMode default_sign_mode(ResidualTarget t);

struct Violation {
    std::string check;
    std::size_t node = 0;
    double location = 0.0;
    double value = 0.0;
};

struct ResidualReport {
    std::string target;
    std::vector<double> grid;        // evaluation nodes
    std::vector<double> residuals;   // aligned with grid
    std::vector<std::size_t> nodes;  // profile indices of the evaluation nodes
    double max_abs_residual = 0.0;
    double max_violation = 0.0;      // signed violation measure for the sign mode
    std::size_t worst_node = 0;
    double worst_location = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    SignMode sign_mode = SignMode::Equality;
    std::size_t critical_nodes_skipped = 0;
    std::vector<Violation> violations;  // extra pointwise checks layered on top

    /// Recomputes max_abs_residual, max_violation, worst_* and pass.
    void finalize();
    void add_violation(Violation v);
};

struct ResidualOptions {
    double tolerance = 1e-8;
    std::optional<SignMode> sign_mode;  // default from the target
    double alpha = 0.0;                 // BarrierOde / StrictSubsolution shift
    double kappa = 0.125;               // h = 4 kappa f
    std::optional<double> lo;           // restrict to nodes in [lo, hi]
    std::optional<double> hi;
};

/// Evaluates the target at every interior node of the profile (optionally
/// restricted to [lo, hi]).
ResidualReport residual_report(ResidualTarget target, const Profile& profile,
                               const NonlinearitySpec& f, const GradientInput& g, Operator op,
                               const ResidualOptions& options = {});

/// 2 e^{3r} - e^{3 alpha r}: the infinity-Laplacian expression of u = e^{|x|}
/// with G(s) = s^3, f(s) = s^{3 alpha}.
double counterexample_eval(double alpha, double r);

struct CounterexampleScan {
    double alpha = 0.0;
    double r_max = 0.0;
    std::size_t nodes = 0;
    double min_value = 0.0;
    double argmin = 0.0;
};

CounterexampleScan counterexample_scan(double alpha, double r_max, std::size_t nodes);

/// Structural check of the gradient-vanishing viscosity clause at a support
/// edge: value and one-sided slopes vanish and f(value) = 0, so every C^2 test
/// touching there has zero gradient and the clause reduces to a sign condition
/// on the extreme eigenvalue of its Hessian.
struct KinkReport {
    bool holds = false;
    bool value_vanishes = false;
    bool slope_vanishes = false;
    bool absorption_vanishes = false;
    double edge = 0.0;
    double edge_value = 0.0;
    double edge_slope = 0.0;
    double zero_side_max = 0.0;  // largest |value| on the extension side
    double tolerance = kGluingTolerance;
    std::string failing_condition;
};

KinkReport kink_viscosity_check(const Profile& profile, const NonlinearitySpec& f,
                                double tolerance = kGluingTolerance);

}  // namespace ilab
