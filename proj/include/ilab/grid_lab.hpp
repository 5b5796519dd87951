// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"
#include "ilab/radial_ops.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ilab {

/// [a, b] split into n cells (n + 1 nodes).
struct IntervalGeometry {
    double a = 1.0;
    double b = 2.0;
    std::size_t n = 64;
};

/// [x0, x1] x [y0, y1] with nx, ny cells and equal spacing on both axes.
struct BoxGeometry {
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    std::size_t nx = 16, ny = 16;
};

using Geometry = std::variant<IntervalGeometry, BoxGeometry>;

/// Nodal values with a Dirichlet mask. Box nodes are stored row-major
/// (index = j * (nx + 1) + i).
struct GridFunction {
    Geometry geometry;
    double h = 0.0;
    std::vector<double> values;
    std::vector<bool> boundary_mask;
    std::vector<double> boundary_values;  // meaningful on masked nodes only

    static GridFunction interval(const IntervalGeometry& g);
    static GridFunction box(const BoxGeometry& g);

    bool is_interval() const { return std::holds_alternative<IntervalGeometry>(geometry); }
    std::size_t size() const { return values.size(); }
    std::size_t nx_nodes() const;
    std::size_t ny_nodes() const;
    /// Node coordinate along the interval (x for boxes).
    double coordinate(std::size_t node) const;
    std::vector<double> coordinates() const;
    /// Sets a boundary node and its value.
    void fix(std::size_t node, double value);

    /// >= 3 nodes per axis, finite values, masked nodes hold their boundary values.
    void validate() const;
};

bool same_geometry(const GridFunction& a, const GridFunction& b);

struct SolverConfig {
    double tolerance_factor = 1e-10;  // update tolerance = factor * (b - a)
    int max_iterations = 10000;
    double jacobian_floor = 1e-14;    // lower bound on squared one-sided slopes in the Jacobian
    int max_backtracks = 40;
};

struct SolveReport {
    int iterations = 0;
    double final_update_norm = 0.0;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// ConvergenceFailure that carries the last iterate.
class SolveFailure : public Error {
public:
    SolveFailure(const std::string& message, GridFunction last, SolveReport report);
    const GridFunction& last_iterate() const { return last_; }
    const SolveReport& report() const { return report_; }

private:
    GridFunction last_;
    SolveReport report_;
};

/// Discrete residual op_h(u) + G(|D_h u|) - f(u) at every node (0 on the
/// boundary). On intervals op_h is
///   L1: ((D+u)^3 - (D-u)^3) / (3h),   L0: (D+u - D-u) / h,
/// with G on the central slope. On boxes op_h is the 8-neighbour
/// max-plus-min stencil, scaled by a centred |Du|^2 for L1.
std::vector<double> discrete_residual(const GridFunction& u, const NonlinearitySpec& f,
                                      const GradientInput& g, Operator op);

/// Damped Newton with a tridiagonal solve, backtracking by 1/2 when the
/// residual grows, iterates projected onto u >= 0. Throws SolveFailure.
SolveResult solve_radial_dirichlet(const NonlinearitySpec& f, const GradientInput& g, Operator op,
                                   const IntervalGeometry& geometry, double left, double right,
                                   const SolverConfig& cfg = {});

/// Nonlinear Gauss-Seidel with per-node bisection. `boundary` supplies the
/// Dirichlet data from the node coordinates.
SolveResult solve_box_dirichlet(const NonlinearitySpec& f, const GradientInput& g, Operator op,
                                const BoxGeometry& geometry,
                                const std::function<double(double, double)>& boundary,
                                const SolverConfig& cfg = {});

using NodeFunction = std::function<double(std::size_t node)>;

struct ComparisonReport {
    bool hypotheses_hold = false;
    bool conclusion_holds = false;
    std::optional<Violation> hypothesis_violation;  // first one found
    std::optional<Violation> conclusion_violation;
    std::size_t hypothesis_violations = 0;
    std::size_t conclusion_violations = 0;
    double realized_gap = 0.0;       // min over interior nodes of h - h~
    double min_margin = 0.0;         // min over nodes of v - u
    std::vector<double> u_residual;  // aligned with nodes
    std::vector<double> v_residual;
};

/// Discrete comparison: hypotheses are residual(u) >= h, residual(v) <= h~,
/// h > h~ at interior nodes and v >= u on the boundary; the conclusion is
/// v >= u at every node. Throws Usage when the geometries differ.
ComparisonReport discrete_comparison_check(const GridFunction& u, const GridFunction& v,
                                           const NodeFunction& h, const NodeFunction& h_tilde,
                                           const NonlinearitySpec& f, const GradientInput& g,
                                           Operator op);

/// Lifted dead-core comparison on [1, 2]: u solves the Dirichlet problem with
/// u(1) = left, u(2) = 0; v(r) = phi(1 + r_circ - r) + epsilon, phi the
/// dead-core profile of f, zero beyond the support. Residual targets are
/// h = -1e-6 and h~ = -f(v)/2. An interior lowered_node pushes v 1e-3 below u.
struct LiftedComparisonSetup {
    std::size_t n = 1024;
    double r_circ = 0.8;
    double epsilon = 1e-3;
    double left = 1.0;
    std::optional<std::size_t> lowered_node;
};

struct LiftedComparison {
    SolveResult u;
    GridFunction v;
    double h = 0.0;
    ComparisonReport report;
};

LiftedComparison lifted_deadcore_comparison(const NonlinearitySpec& f, Operator op,
                                            const LiftedComparisonSetup& setup = {});

struct DeadCore {
    double width = 0.0;              // interval: (nodes - 1) h per component; box: nodes h^2
    std::vector<std::size_t> nodes;  // sorted
};

/// Maximal set connected to a boundary node with u <= threshold, grown from
/// those boundary nodes.
DeadCore detect_dead_core(const GridFunction& u, double threshold);

struct ExperimentSpec {
    double q = 1.0;
    double lambda = 1.0;
    Operator op = Operator::L1;
    std::size_t resolution = 1024;
};

struct ExperimentReport {
    ExperimentSpec spec;
    double h = 0.0;
    double threshold = 0.0;
    double dead_core_width = 0.0;
    std::size_t dead_core_nodes = 0;
    double interior_min = 0.0;
    double midpoint_value = 0.0;
    ClassificationResult classification;
    SolveReport solve;
    GridFunction u;
};

/// Solves op(u) - lambda u^q = 0 on [1, 2] with u(1) = 0, u(2) = 1 and reports
/// the dead core at threshold h^2 next to the classifier verdict for the
/// matching integral (F^{-1/4} for L1, F^{-1/2} for L0).
ExperimentReport smp_csp_experiment(const ExperimentSpec& spec, const SolverConfig& cfg = {});

/// Runs the specs as independent tasks; results keep the input order.
std::vector<ExperimentReport> run_experiment_sweep(const std::vector<ExperimentSpec>& specs,
                                                   const SolverConfig& cfg = {});

}  // namespace ilab
