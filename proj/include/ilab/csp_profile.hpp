// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"
#include "ilab/profile.hpp"
#include "ilab/radial_ops.hpp"

#include <optional>
#include <span>
#include <string>

namespace ilab {

/// Compactly supported radial solution of op(v) + K|Dv|^m - f(v) = 0 outside
/// the unit ball, built from h = 4 kappa f and H = 4 kappa F.
///
/// L1: psi on [R - delta, R] is the fixed point of
///   (Tg)(t) = int_t^R [ int_s^R 6 e^{3K(s-z)} h(g(z)) dz ]^{1/3} ds
/// L0: the same with kernel 2 e^{K(s-z)} and power 1 in place of 1/3.
struct CspConfig {
    Operator op = Operator::L1;
    double K = 1.0;
    double kappa = 0.125;
    std::optional<double> delta;  // default: largest delta meeting both constraints
    double fixed_point_tolerance = 1e-12;
    int max_iterations = 100000;
    std::size_t psi_nodes = 2048;
    std::size_t phi_nodes = 2049;
    double residual_tolerance = 1e-6;
    double invariant_tolerance = 1e-9;  // slack for domination and the sup bound
    double lipschitz_slack = 1e-6;

    void validate() const;
};

/// h(1) = sup_[0,1] h.
double csp_sup_h(const NonlinearitySpec& f, double kappa);

/// Largest delta with 8 e^{-3K delta} >= 1 and 3/4 (6M)^{1/3} delta^{4/3} <= 1
/// (L0: 8 e^{-K delta} >= 1 and M delta^2 <= 1), capped at R.
double default_csp_delta(const CspConfig& cfg, double M, double R);

/// Lipschitz radius of the invariant set: (6 M delta)^{1/3} (L0: 2 M delta).
double csp_lipschitz_bound(Operator op, double M, double delta);

struct SupportRadius {
    double R = 0.0;
    Profile phi;  // on [0, R], phi(0) = 1, phi(R) = 0
};

/// R = int_0^1 H^{-1/4} (L0: int_0^1 (2/H)^{1/2}) and the decreasing comparison
/// profile with op(phi) = h(phi)/4. Throws DivergentIntegral when R is infinite.
SupportRadius compute_support_radius(const NonlinearitySpec& f, double kappa,
                                     Operator op = Operator::L1, std::size_t nodes = 2049);

/// One application of the map on the uniform grid s (ending at R).
/// Returns Tg and fills `slope` with (Tg)'.
std::vector<double> apply_csp_map(const NonlinearitySpec& f, const CspConfig& cfg,
                                  std::span<const double> s, std::span<const double> g,
                                  std::vector<double>* slope = nullptr);

struct PsiReport {
    Profile psi;
    double delta = 0.0;
    double requested_delta = 0.0;
    bool delta_shrunk = false;    // sup bound forced a smaller delta
    int iterations = 0;
    double final_update = 0.0;
    double lipschitz_bound = 0.0;
    double lipschitz_constant = 0.0;  // realized max difference quotient
    double sup_norm = 0.0;
    double min_domination_gap = 0.0;  // min (psi - phi)
    bool first_step_dominates = false;  // T(phi) >= phi
};

/// Iterates the map from g0 = phi until the sup-norm update drops below the
/// tolerance. Throws ConvergenceFailure or InvariantViolation.
PsiReport build_psi(const NonlinearitySpec& f, const CspConfig& cfg, double R, const Profile& phi);

struct CompactSolution {
    Profile profile;  // v(r) = psi(r + r_circ) on [1, 1 + delta], 0 on [1 + delta, 1 + 2 delta]
    double r_circ = 0.0;
    ResidualReport residual;       // op(v) + K|v'|^m - f(v) = 0 on (1, 1 + delta)
    ResidualReport supersolution;  // op(v) - f(v) <= 0
    KinkReport viscosity_clause;
};

/// Throws Geometry when R - delta <= 1 and Gluing when the edge is not C1.
CompactSolution assemble_compact_solution(const Profile& psi, const CspConfig& cfg, double R,
                                          const NonlinearitySpec& f);

struct CspResult {
    double support_radius = 0.0;
    Profile phi;
    ResidualReport phi_residual;  // op(phi) - h(phi)/4 = 0
    PsiReport psi;
    ResidualReport psi_residual;  // the psi ODE on (R - delta, R)
    double r_circ = 0.0;
    std::optional<CompactSolution> assembled;  // absent when the geometry fails
    std::string geometry_error;
    double lipschitz_bound = 0.0;
    int iterations = 0;
    bool pass = false;
};

CspResult run_csp_pipeline(const NonlinearitySpec& f, const CspConfig& cfg);

}  // namespace ilab
