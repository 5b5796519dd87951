// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"
#include "ilab/profile.hpp"
#include "ilab/radial_ops.hpp"

#include <string>

namespace ilab {

struct DeadcoreConfig {
    std::size_t nodes = 2001;          // uniform t-grid on [0, horizon]
    double phi_min = 1e-12;            // first rung of the phi-ladder
    int per_decade = 64;
    double identity_tolerance = 1e-8;  // relative, on Gamma(phi') = F(phi)/4
};

/// phi defined implicitly by t = int_0^phi ds / Gamma^-1(F(s)/4), so that
/// Gamma(phi') = F(phi)/4. The operator is taken from g.op.
Profile build_deadcore_profile(const NonlinearitySpec& f, const GradientTermSpec& g, double horizon,
                               const DeadcoreConfig& cfg = {});

/// Largest relative defect of Gamma(phi') = F(phi)/4 over the nodes with t > 0.
double deadcore_identity_residual(const Profile& profile, const NonlinearitySpec& f,
                                  const GradientTermSpec& g);

struct RCircReport {
    double r_circ = 0.0;
    std::size_t node = 0;
    /// Pointwise values of op(phi) + G(phi') - f(phi)/2 (<= 0 wanted).
    std::vector<double> inequality;
    /// G(phi') <= f(phi)/4 on (0, r_circ].
    bool gradient_bound_holds = false;
    /// op(phi) <= f(phi)/4 on (0, r_circ].
    bool curvature_bound_holds = false;
    std::size_t gradient_bound_first_failure = 0;   // 0: none
    std::size_t curvature_bound_first_failure = 0;  // 0: none
};

/// Scans the nodes from t = 0 and stops before the first node where
///   op(phi) + G(phi') - f(phi)/2 <= 0
/// fails. Throws NoValidRadius if it fails at the first interior node.
RCircReport determine_r_circ(const Profile& profile, const NonlinearitySpec& f,
                             const GradientTermSpec& g);

struct RadialSupersolution {
    Profile profile;  // v(r) = phi(R + r_circ - r) on [R, R + r_circ], 0 beyond
    /// Gradient-vanishing clause at the support edge.
    KinkReport viscosity_clause;
};

/// Throws Domain when r_circ exceeds the profile and Gluing when the value or
/// slope at the edge is not zero within kGluingTolerance.
RadialSupersolution assemble_radial_supersolution(const Profile& profile, double R, double r_circ,
                                                  const NonlinearitySpec& f);

}  // namespace ilab
