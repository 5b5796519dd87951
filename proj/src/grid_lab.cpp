// SPDX-License-Identifier: MIT
#include "ilab/grid_lab.hpp"

#include "ilab/deadcore.hpp"
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <numeric>
#include <sstream>

namespace ilab {

// ---- GridFunction -------------------------------------------------------

GridFunction GridFunction::interval(const IntervalGeometry& g) {
    if (g.n < 2 || !(g.b > g.a)) raise(ErrorCode::Usage, "interval needs b > a and n >= 2 cells");
    GridFunction u;
    u.geometry = g;
    u.h = (g.b - g.a) / static_cast<double>(g.n);
    u.values.assign(g.n + 1, 0.0);
    u.boundary_mask.assign(g.n + 1, false);
    u.boundary_values.assign(g.n + 1, 0.0);
    u.boundary_mask.front() = u.boundary_mask.back() = true;
    return u;
}

GridFunction GridFunction::box(const BoxGeometry& g) {
    if (g.nx < 2 || g.ny < 2 || !(g.x1 > g.x0) || !(g.y1 > g.y0)) {
        raise(ErrorCode::Usage, "box needs positive extents and >= 2 cells per axis");
    }
    const double hx = (g.x1 - g.x0) / static_cast<double>(g.nx);
    const double hy = (g.y1 - g.y0) / static_cast<double>(g.ny);
    if (std::abs(hx - hy) > 1e-12 * hx) raise(ErrorCode::Usage, "box spacing must agree on both axes");
    GridFunction u;
    u.geometry = g;
    u.h = hx;
    const std::size_t n = (g.nx + 1) * (g.ny + 1);
    u.values.assign(n, 0.0);
    u.boundary_mask.assign(n, false);
    u.boundary_values.assign(n, 0.0);
    for (std::size_t j = 0; j <= g.ny; ++j) {
        for (std::size_t i = 0; i <= g.nx; ++i) {
            if (i == 0 || j == 0 || i == g.nx || j == g.ny) u.boundary_mask[j * (g.nx + 1) + i] = true;
        }
    }
    return u;
}

std::size_t GridFunction::nx_nodes() const {
    if (const auto* g = std::get_if<IntervalGeometry>(&geometry)) return g->n + 1;
    return std::get<BoxGeometry>(geometry).nx + 1;
}

std::size_t GridFunction::ny_nodes() const {
    if (is_interval()) return 1;
    return std::get<BoxGeometry>(geometry).ny + 1;
}

double GridFunction::coordinate(std::size_t node) const {
    if (const auto* g = std::get_if<IntervalGeometry>(&geometry)) {
        return node == g->n ? g->b : g->a + h * static_cast<double>(node);
    }
    const auto& b = std::get<BoxGeometry>(geometry);
    return b.x0 + h * static_cast<double>(node % (b.nx + 1));
}

std::vector<double> GridFunction::coordinates() const {
    std::vector<double> x(size());
    for (std::size_t i = 0; i < size(); ++i) x[i] = coordinate(i);
    return x;
}

void GridFunction::fix(std::size_t node, double value) {
    boundary_mask.at(node) = true;
    boundary_values.at(node) = value;
    values.at(node) = value;
}

void GridFunction::validate() const {
    if (nx_nodes() < 3 || (!is_interval() && ny_nodes() < 3)) {
        raise(ErrorCode::InvariantViolation, "grid function needs >= 3 nodes per axis");
    }
    if (values.size() != nx_nodes() * ny_nodes() || boundary_mask.size() != values.size() ||
        boundary_values.size() != values.size()) {
        raise(ErrorCode::InvariantViolation, "grid function arrays disagree with the geometry");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) raise(ErrorCode::InvariantViolation, "grid function has a non-finite value");
        if (boundary_mask[i] && values[i] != boundary_values[i]) {
            raise(ErrorCode::InvariantViolation, "boundary node differs from its Dirichlet value");
        }
    }
}

bool same_geometry(const GridFunction& a, const GridFunction& b) {
    if (a.geometry.index() != b.geometry.index() || a.size() != b.size()) return false;
    if (a.is_interval()) {
        const auto& x = std::get<IntervalGeometry>(a.geometry);
        const auto& y = std::get<IntervalGeometry>(b.geometry);
        return x.a == y.a && x.b == y.b && x.n == y.n;
    }
    const auto& x = std::get<BoxGeometry>(a.geometry);
    const auto& y = std::get<BoxGeometry>(b.geometry);
    return x.x0 == y.x0 && x.x1 == y.x1 && x.y0 == y.y0 && x.y1 == y.y1 && x.nx == y.nx && x.ny == y.ny;
}

SolveFailure::SolveFailure(const std::string& message, GridFunction last, SolveReport report)
    : Error(ErrorCode::ConvergenceFailure, message), last_(std::move(last)), report_(report) {}

// ---- discrete operators -------------------------------------------------

namespace {

/// f extended oddly below zero.
double f_odd(const NonlinearitySpec& f, double u) {
    const double cap = f.domain_cap();
    return u >= 0.0 ? f.value(std::min(u, cap)) : -f.value(std::min(-u, cap));
}

/// f'(|u|), replaced by a secant slope where f' is unbounded (q < 1 at 0).
double f_slope(const NonlinearitySpec& f, double u) {
    const double a = std::min(std::abs(u), f.domain_cap());
    const double s = f.slope(a);
    if (std::isfinite(s)) return s;
    const double b = std::max(a, 1e-12);
    return f.value(b) / b;
}

/// dG/dc at the signed central slope c.
double gradient_slope(const GradientInput& g, Operator op, double c) {
    const double sign = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
    const double a = std::abs(c);
    if (const auto* K = std::get_if<double>(&g)) {
        return sign * (op == Operator::L1 ? 3.0 * *K * a * a : *K);
    }
    const auto& spec = std::get<GradientTermSpec>(g);
    if (spec.term.identically_zero()) return 0.0;
    return sign * spec.term.slope(a);
}

double interval_residual_at(std::span<const double> u, std::size_t i, double h,
                            const NonlinearitySpec& f, const GradientInput& g, Operator op) {
    const double dp = (u[i + 1] - u[i]) / h;
    const double dm = (u[i] - u[i - 1]) / h;
    const double central = 0.5 * (dp + dm);
    const double lop = op == Operator::L1 ? (dp * dp * dp - dm * dm * dm) / (3.0 * h) : (dp - dm) / h;
    return lop + gradient_term(g, op, central) - f_odd(f, u[i]);
}

std::vector<double> interval_residual(std::span<const double> u, double h, const NonlinearitySpec& f,
                                      const GradientInput& g, Operator op) {
    std::vector<double> r(u.size(), 0.0);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) r[i] = interval_residual_at(u, i, h, f, g, op);
    return r;
}

double l2(std::span<const double> r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
}

double linf(std::span<const double> r) {
    double s = 0.0;
    for (double x : r) s = std::max(s, std::abs(x));
    return s;
}

struct BoxStencil {
    std::size_t nx1 = 0;  // nodes per row
    double h = 0.0;
};

/// Operator value at an interior box node with the centre value replaced by c.
double box_operator(std::span<const double> u, std::size_t node, double c, const BoxStencil& st,
                    const NonlinearitySpec& f, const GradientInput& g, Operator op) {
    static constexpr int di[8] = {1, -1, 0, 0, 1, -1, 1, -1};
    static constexpr int dj[8] = {0, 0, 1, -1, 1, -1, -1, 1};
    const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(st.nx1);
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(node);
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (int d = 0; d < 8; ++d) {
        const double dist2 = (d < 4 ? 1.0 : 2.0) * st.h * st.h;
        const double s = (u[static_cast<std::size_t>(k + dj[d] * row + di[d])] - c) / dist2;
        hi = std::max(hi, s);
        lo = std::min(lo, s);
    }
    double lop = hi + lo;
    const double ux = (u[node + 1] - u[node - 1]) / (2.0 * st.h);
    const double uy = (u[node + st.nx1] - u[node - st.nx1]) / (2.0 * st.h);
    const double grad2 = ux * ux + uy * uy;
    if (op == Operator::L1) lop *= grad2;
    return lop + gradient_term(g, op, std::sqrt(grad2)) - f_odd(f, c);
}

}  // namespace

std::vector<double> discrete_residual(const GridFunction& u, const NonlinearitySpec& f,
                                      const GradientInput& g, Operator op) {
    if (u.is_interval()) return interval_residual(u.values, u.h, f, g, op);
    std::vector<double> r(u.size(), 0.0);
    const BoxStencil st{u.nx_nodes(), u.h};
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!u.boundary_mask[k]) r[k] = box_operator(u.values, k, u.values[k], st, f, g, op);
    }
    return r;
}

// ---- solvers ------------------------------------------------------------

SolveResult solve_radial_dirichlet(const NonlinearitySpec& f, const GradientInput& g, Operator op,
                                   const IntervalGeometry& geometry, double left, double right,
                                   const SolverConfig& cfg) {
    if (left < 0.0 || right < 0.0) raise(ErrorCode::Usage, "boundary values must be nonnegative");
    GridFunction u = GridFunction::interval(geometry);
    const std::size_t N = geometry.n;
    u.fix(0, left);
    u.fix(N, right);
    for (std::size_t i = 1; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N);
        u.values[i] = (1.0 - t) * left + t * right;
    }
    const double h = u.h;
    const double tol = cfg.tolerance_factor * (geometry.b - geometry.a);

    SolveReport rep;
    rep.tolerance = tol;
    std::vector<double> r = interval_residual(u.values, h, f, g, op);
    double merit = l2(r);
    const std::size_t m = N - 1;
    std::vector<double> lower(m), diag(m), upper(m), rhs(m), trial(u.values.size());
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            const double dp = (u.values[i + 1] - u.values[i]) / h;
            const double dm = (u.values[i] - u.values[i - 1]) / h;
            double a, b;
            if (op == Operator::L1) {
                a = std::max(dm * dm, cfg.jacobian_floor) / (h * h);
                b = std::max(dp * dp, cfg.jacobian_floor) / (h * h);
            } else {
                a = b = 1.0 / (h * h);
            }
            const double gs = gradient_slope(g, op, 0.5 * (dp + dm)) / (2.0 * h);
            lower[k] = a - gs;
            upper[k] = b + gs;
            diag[k] = -(a + b) - f_slope(f, u.values[i]);
            rhs[k] = -r[i];
        }
        const std::vector<double> step = numerics::solve_tridiagonal(lower, diag, upper, rhs);
        rep.iterations = it;
        // projected step: nodes pinned at zero by the constraint do not count as motion
        double projected = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            projected = std::max(projected, std::abs(std::max(0.0, u.values[k + 1] + step[k]) - u.values[k + 1]));
        rep.final_update_norm = projected;

        double lambda = 1.0;
        double trial_merit = merit;
        std::vector<double> trial_r;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            trial = u.values;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] = std::max(0.0, u.values[k + 1] + lambda * step[k]);
            trial_r = interval_residual(trial, h, f, g, op);
            trial_merit = l2(trial_r);
            if (trial_merit <= merit || bt == cfg.max_backtracks) break;
            lambda *= 0.5;
        }
        u.values.swap(trial);
        r.swap(trial_r);
        merit = trial_merit;
        if (!std::isfinite(merit)) break;
        if (rep.final_update_norm <= tol) {
            rep.converged = true;
            break;
        }
    }
    rep.residual_norm = linf(r);
    if (!rep.converged) {
        std::ostringstream os;
        os << "Newton did not converge in " << rep.iterations << " iterations (last update "
           << rep.final_update_norm << ", residual " << rep.residual_norm << ")";
        throw SolveFailure(os.str(), u, rep);
    }
    return {std::move(u), rep};
}

SolveResult solve_box_dirichlet(const NonlinearitySpec& f, const GradientInput& g, Operator op,
                                const BoxGeometry& geometry,
                                const std::function<double(double, double)>& boundary,
                                const SolverConfig& cfg) {
    GridFunction u = GridFunction::box(geometry);
    const std::size_t nx1 = geometry.nx + 1;
    double top = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!u.boundary_mask[k]) continue;
        const double x = geometry.x0 + u.h * static_cast<double>(k % nx1);
        const double y = geometry.y0 + u.h * static_cast<double>(k / nx1);
        const double b = boundary(x, y);
        if (b < 0.0) raise(ErrorCode::Usage, "boundary values must be nonnegative");
        u.fix(k, b);
        top = std::max(top, b);
    }
    const BoxStencil st{nx1, u.h};
    const double tol = cfg.tolerance_factor * (geometry.x1 - geometry.x0);
    SolveReport rep;
    rep.tolerance = tol;
    for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
        double change = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (u.boundary_mask[k]) continue;
            // the node residual is nonincreasing in the centre value
            const auto F = [&](double c) { return box_operator(u.values, k, c, st, f, g, op); };
            double lo = 0.0;
            double hi = std::max(top, u.values[k]);
            for (int grow = 0; grow < 60 && F(hi) > 0.0; ++grow) hi = 2.0 * hi + 1.0;
            if (F(lo) <= 0.0) {
                hi = lo;
            }
            for (int b = 0; b < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++b) {
                const double mid = 0.5 * (lo + hi);
                (F(mid) > 0.0 ? lo : hi) = mid;
            }
            const double next = 0.5 * (lo + hi);
            change = std::max(change, std::abs(next - u.values[k]));
            u.values[k] = next;
        }
        rep.iterations = sweep;
        rep.final_update_norm = change;
        if (change <= tol) {
            rep.converged = true;
            break;
        }
    }
    rep.residual_norm = linf(discrete_residual(u, f, g, op));
    if (!rep.converged) {
        std::ostringstream os;
        os << "Gauss-Seidel did not converge in " << rep.iterations << " sweeps (last update "
           << rep.final_update_norm << ")";
        throw SolveFailure(os.str(), u, rep);
    }
    return {std::move(u), rep};
}

// ---- comparison and dead cores ------------------------------------------

ComparisonReport discrete_comparison_check(const GridFunction& u, const GridFunction& v,
                                           const NodeFunction& h, const NodeFunction& h_tilde,
                                           const NonlinearitySpec& f, const GradientInput& g,
                                           Operator op) {
    if (!same_geometry(u, v)) raise(ErrorCode::Usage, "comparison needs grid functions on the same geometry");
    ComparisonReport rep;
    rep.u_residual = discrete_residual(u, f, g, op);
    rep.v_residual = discrete_residual(v, f, g, op);
    rep.realized_gap = std::numeric_limits<double>::infinity();
    rep.min_margin = std::numeric_limits<double>::infinity();
    const auto hypothesis = [&](const char* check, std::size_t node, double value) {
        ++rep.hypothesis_violations;
        if (!rep.hypothesis_violation) rep.hypothesis_violation = Violation{check, node, u.coordinate(node), value};
    };
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u.boundary_mask[k]) {
            if (v.values[k] < u.values[k]) hypothesis("boundary_order", k, v.values[k] - u.values[k]);
            continue;
        }
        const double hk = h(k);
        const double htk = h_tilde(k);
        rep.realized_gap = std::min(rep.realized_gap, hk - htk);
        if (!(hk > htk)) hypothesis("strict_gap", k, hk - htk);
        if (rep.u_residual[k] < hk) hypothesis("subsolution", k, rep.u_residual[k] - hk);
        if (rep.v_residual[k] > htk) hypothesis("supersolution", k, rep.v_residual[k] - htk);
    }
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double margin = v.values[k] - u.values[k];
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < 0.0) {
            ++rep.conclusion_violations;
            if (!rep.conclusion_violation) rep.conclusion_violation = Violation{"ordering", k, u.coordinate(k), margin};
        }
    }
    rep.hypotheses_hold = rep.hypothesis_violations == 0;
    rep.conclusion_holds = rep.conclusion_violations == 0;
    return rep;
}

LiftedComparison lifted_deadcore_comparison(const NonlinearitySpec& f, Operator op,
                                            const LiftedComparisonSetup& setup) {
    if (setup.lowered_node && (*setup.lowered_node == 0 || *setup.lowered_node >= setup.n))
        raise(ErrorCode::Usage, "lowered node must be interior");
    const auto g = GradientTermSpec::none(op);
    const IntervalGeometry geom{1.0, 2.0, setup.n};
    LiftedComparison out{solve_radial_dirichlet(f, GradientInput{g}, op, geom, setup.left, 0.0),
                         GridFunction::interval(geom), -1e-6, {}};
    const Profile phi = build_deadcore_profile(f, g, setup.r_circ);
    GridFunction& v = out.v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = 1.0 + setup.r_circ - v.coordinate(i);
        v.values[i] = (t > 0.0 ? phi.value_at(std::min(t, setup.r_circ)) : 0.0) + setup.epsilon;
    }
    if (setup.lowered_node) v.values[*setup.lowered_node] = out.u.u.values[*setup.lowered_node] - 1e-3;
    v.fix(0, v.values.front());
    v.fix(setup.n, v.values.back());
    const double h = out.h;
    out.report = discrete_comparison_check(
        out.u.u, v, [h](std::size_t) { return h; },
        [&](std::size_t k) { return -0.5 * f.value(std::max(v.values[k], 0.0)); }, f, GradientInput{g}, op);
    return out;
}

DeadCore detect_dead_core(const GridFunction& u, double threshold) {
    DeadCore out;
    std::vector<bool> seen(u.size(), false);
    std::deque<std::size_t> queue;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u.boundary_mask[k] && u.values[k] <= threshold) {
            seen[k] = true;
            queue.push_back(k);
        }
    }
    const std::size_t nx1 = u.nx_nodes();
    const std::size_t ny1 = u.ny_nodes();
    const auto visit = [&](std::size_t k) {
        if (!seen[k] && u.values[k] <= threshold) {
            seen[k] = true;
            queue.push_back(k);
        }
    };
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        out.nodes.push_back(k);
        const std::size_t i = k % nx1;
        const std::size_t j = k / nx1;
        if (i > 0) visit(k - 1);
        if (i + 1 < nx1) visit(k + 1);
        if (j > 0) visit(k - nx1);
        if (j + 1 < ny1) visit(k + nx1);
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    if (u.is_interval()) {
        // each run of consecutive nodes contributes (length - 1) cells
        std::size_t cells = 0;
        for (std::size_t a = 0; a < out.nodes.size();) {
            std::size_t b = a;
            while (b + 1 < out.nodes.size() && out.nodes[b + 1] == out.nodes[b] + 1) ++b;
            cells += b - a;
            a = b + 1;
        }
        out.width = static_cast<double>(cells) * u.h;
    } else {
        out.width = static_cast<double>(out.nodes.size()) * u.h * u.h;
    }
    return out;
}

// ---- dichotomy experiment -----------------------------------------------

ExperimentReport smp_csp_experiment(const ExperimentSpec& spec, const SolverConfig& cfg) {
    if (!(spec.q > 0.0) || !(spec.lambda > 0.0)) raise(ErrorCode::Usage, "experiment needs q > 0 and lambda > 0");
    const auto f = MonotoneFunction::power_law(spec.q, spec.lambda);
    const IntervalGeometry geom{1.0, 2.0, spec.resolution};
    ExperimentReport rep;
    rep.spec = spec;
    rep.classification = classify_integral(
        f, IntegrandSelector::inverse_root(spec.op == Operator::L1 ? 4.0 : 2.0), 1.0);
    SolveResult sol = solve_radial_dirichlet(f, GradientTermSpec::none(spec.op), spec.op, geom, 0.0, 1.0, cfg);
    rep.h = sol.u.h;
    rep.threshold = rep.h * rep.h;
    const DeadCore core = detect_dead_core(sol.u, rep.threshold);
    rep.dead_core_width = core.width;
    rep.dead_core_nodes = core.nodes.size();
    rep.interior_min = *std::min_element(sol.u.values.begin() + 1, sol.u.values.end() - 1);
    const std::size_t mid = spec.resolution / 2;
    rep.midpoint_value = spec.resolution % 2 == 0
                             ? sol.u.values[mid]
                             : 0.5 * (sol.u.values[mid] + sol.u.values[mid + 1]);
    rep.solve = sol.report;
    rep.u = std::move(sol.u);
    return rep;
}

std::vector<ExperimentReport> run_experiment_sweep(const std::vector<ExperimentSpec>& specs,
                                                   const SolverConfig& cfg) {
    std::vector<std::future<ExperimentReport>> tasks;
    tasks.reserve(specs.size());
    for (const auto& s : specs) {
        tasks.push_back(std::async(std::launch::async, [s, cfg] { return smp_csp_experiment(s, cfg); }));
    }
    std::vector<ExperimentReport> out;
    out.reserve(specs.size());
    for (auto& t : tasks) out.push_back(t.get());
    return out;
}

}  // namespace ilab
