// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"
#include "ilab/profile.hpp"
#include "ilab/radial_ops.hpp"

#include <optional>

namespace ilab {

/// Parameters of the positivity barrier: a decreasing profile phi on
/// [R/2, R + eps1] solving
///   L1: ((phi')^3)' + K (phi')^3 - f(phi) + alpha = 0
///   L0:   phi''     + K  phi'    - f(phi) + alpha = 0
/// with phi(R) = 0, phi'(R) = alpha < 0 and 0 < phi < epsilon on (R/2, R).
struct BarrierConfig {
    Operator op = Operator::L1;
    double K = 0.0;
    double R = 0.8;
    double epsilon = 0.5;     // height cap
    double alpha_init = -0.1;
    double M1 = 1.0;          // value cap of the continuation
    std::optional<double> M2;        // slope cap; default from the energy bound
    std::optional<double> step_cap;  // window width; default min(0.05, R/20)
    std::size_t grid_resolution = 10000;  // cells on [R/2, R]
    double fixed_point_tolerance = 1e-12;
    int max_fixed_point_iterations = 200;
    double alpha_floor_ratio = 1e-8;
    double residual_tolerance = 1e-8;
    double energy_tolerance = 1e-6;   // relative slack; the inequality is an equality when K = 0
    double terminal_tolerance = 1e-12;

    void validate() const;
    double window_width() const;
};

/// Energy-based slope cap for a given alpha:
///   L1: (e^{K~ R/2} (alpha^4 + 4/3 max_{[0,1]} F_alpha))^{1/4} + 1, K~ = 4K/3
///   L0: (e^{K R} (alpha^2 + 2 max_{[0,1]} F_alpha))^{1/2} + 1
double default_slope_cap(const BarrierConfig& cfg, const NonlinearitySpec& f, double alpha);

struct BarrierResult {
    Profile profile;
    double alpha = 0.0;     // achieved terminal slope
    double epsilon1 = 0.0;  // extension to the right of R
    ResidualReport residual;
    int shrink_iterations = 0;
    int window_splits = 0;       // windows halved because Picard stalled
    double slope_cap = 0.0;      // M2 used by the successful attempt
    std::size_t root_node = 0;   // index of t = R
    Verdict hypothesis = Verdict::Inconclusive;  // divergence condition on f
};

/// Marches the fixed-point map window by window from t = R down to R/2,
/// halving |alpha| and restarting whenever the profile reaches epsilon or the
/// slope cap first.
BarrierResult build_barrier(const BarrierConfig& cfg, const NonlinearitySpec& f);

/// ODE residual from the stored slopes (finite-difference curvature), terminal
/// conditions, the sign conditions on (R/2, R) and the energy inequality.
ResidualReport verify_barrier(const BarrierResult& result, const BarrierConfig& cfg,
                              const NonlinearitySpec& f);

}  // namespace ilab
