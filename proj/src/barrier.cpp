// SPDX-License-Identifier: MIT
#include "ilab/barrier.hpp"

#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ilab {

void BarrierConfig::validate() const {
    if (!(R > 0.0 && R < 1.0)) raise(ErrorCode::InvariantViolation, "barrier needs 0 < R < 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        raise(ErrorCode::InvariantViolation, "barrier needs 0 < epsilon < 1");
    }
    if (!(alpha_init < 0.0)) raise(ErrorCode::InvariantViolation, "barrier needs alpha_init < 0");
    if (!(M1 >= epsilon)) raise(ErrorCode::InvariantViolation, "barrier needs M1 >= epsilon");
    if (!(K >= 0.0)) raise(ErrorCode::InvariantViolation, "barrier needs K >= 0");
    if (M2 && !(*M2 > 0.0)) raise(ErrorCode::InvariantViolation, "M2 must be positive");
    if (step_cap && !(*step_cap > 0.0)) raise(ErrorCode::InvariantViolation, "step cap must be positive");
    if (grid_resolution < 4) raise(ErrorCode::InvariantViolation, "grid resolution must be >= 4");
}

double BarrierConfig::window_width() const { return step_cap.value_or(std::min(0.05, R / 20.0)); }

namespace {

int power_of(Operator op) { return op == Operator::L1 ? 3 : 1; }

double ipow(double x, int p) { return p == 3 ? x * x * x : x; }

/// f_alpha = f - alpha, extended by -alpha below zero.
double f_alpha(const NonlinearitySpec& f, double alpha, double x) {
    if (x <= 0.0) return -alpha;
    return f.value(std::min(x, f.domain_cap())) - alpha;
}

double F_alpha(const NonlinearitySpec& f, double alpha, double x) {
    if (x <= 0.0) return -alpha * x;
    return f.primitive(std::min(x, f.domain_cap())) - alpha * x;
}

struct Window {
    std::vector<double> phi;  // j = 0 at t0
    std::vector<double> w;    // (phi')^p
    bool converged = false;
};

/// Fixed point of
///   (Tg)(s) = xi + int_{t0}^{s} root_p(w(z)) dz,
///   w(s) = e^{K(t0-s)} w0 + int_{t0}^{s} e^{K(z-s)} f_alpha(g(z)) dz
/// on the m-step window starting at t0 in direction `dir` (+1 or -1).
Window solve_window(const NonlinearitySpec& f, const BarrierConfig& cfg, double alpha, double xi,
                    double w0, std::size_t m, double h, int dir) {
    const int p = power_of(cfg.op);
    const double step = dir * h;
    Window win;
    std::vector<double> g(m + 1), q(m + 1), slope(m + 1), grow(m + 1), decay(m + 1);
    const double gamma = numerics::signed_root(w0, p);
    for (std::size_t j = 0; j <= m; ++j) {
        const double dist = step * static_cast<double>(j);
        g[j] = xi + gamma * dist;
        grow[j] = std::exp(cfg.K * dist);
        decay[j] = 1.0 / grow[j];
    }
    std::vector<double> w(m + 1), gnew(m + 1);
    double damping = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_fixed_point_iterations; ++it) {
        for (std::size_t j = 0; j <= m; ++j) q[j] = grow[j] * f_alpha(f, alpha, g[j]);
        double acc = 0.0;
        w[0] = w0;
        slope[0] = numerics::signed_root(w0, p);
        for (std::size_t j = 1; j <= m; ++j) {
            acc += 0.5 * step * (q[j] + q[j - 1]);
            w[j] = (w0 + acc) * decay[j];
            slope[j] = numerics::signed_root(w[j], p);
        }
        gnew[0] = xi;
        double diff = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            gnew[j] = gnew[j - 1] + 0.5 * step * (slope[j] + slope[j - 1]);
            diff = std::max(diff, std::abs(gnew[j] - g[j]));
        }
        if (!std::isfinite(diff)) break;
        for (std::size_t j = 0; j <= m; ++j) g[j] += damping * (gnew[j] - g[j]);
        if (diff <= cfg.fixed_point_tolerance) {
            // g and w are consistent only for an undamped final step
            if (damping != 1.0) g = gnew;
            win.converged = true;
            break;
        }
        if (diff > prev) damping = 0.5;
        prev = diff;
    }
    // final w from the accepted iterate
    double acc = 0.0;
    w[0] = w0;
    for (std::size_t j = 1; j <= m; ++j) {
        acc += 0.5 * step * (grow[j] * f_alpha(f, alpha, g[j]) + grow[j - 1] * f_alpha(f, alpha, g[j - 1]));
        w[j] = (w0 + acc) * decay[j];
    }
    win.phi = std::move(g);
    win.w = std::move(w);
    return win;
}

enum class Attempt { Success, Shrink };

struct AttemptOutput {
    Attempt status = Attempt::Shrink;
    std::vector<double> phi, w;  // left part, index 0 at R/2
    std::vector<double> phi_r, w_r;  // right extension, index 0 at R
    double h_right = 0.0;
    int splits = 0;
};

/// Solves a window, halving its length until Picard converges.
Window solve_window_adaptive(const NonlinearitySpec& f, const BarrierConfig& cfg, double alpha,
                             double xi, double w0, std::size_t& m, double h, int dir, int& splits) {
    for (;;) {
        Window win = solve_window(f, cfg, alpha, xi, w0, m, h, dir);
        if (win.converged) return win;
        if (m == 1) {
            std::ostringstream os;
            os << "barrier fixed-point iteration did not contract on a single step (alpha = "
               << alpha << ")";
            raise(ErrorCode::ConvergenceFailure, os.str());
        }
        m = std::max<std::size_t>(1, m / 2);
        ++splits;
    }
}

AttemptOutput attempt(const BarrierConfig& cfg, const NonlinearitySpec& f, double alpha, double M2,
                      double h, std::size_t window_steps) {
    const int p = power_of(cfg.op);
    const std::size_t N = cfg.grid_resolution;
    AttemptOutput out;
    out.phi.assign(N + 1, 0.0);
    out.w.assign(N + 1, 0.0);
    out.w[N] = ipow(alpha, p);

    std::size_t idx = N;
    while (idx > 0) {
        std::size_t m = std::min(window_steps, idx);
        Window win = solve_window_adaptive(f, cfg, alpha, out.phi[idx], out.w[idx], m, h, -1, out.splits);
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t node = idx - j;
            out.phi[node] = win.phi[j];
            out.w[node] = win.w[j];
            const double slope = numerics::signed_root(win.w[j], p);
            // continuation stops when the value cap or the slope cap is hit first
            if (node > 0 && (win.phi[j] >= cfg.epsilon || std::abs(win.phi[j]) > cfg.M1 ||
                             std::abs(slope) >= M2)) {
                out.status = Attempt::Shrink;
                return out;
            }
        }
        idx -= m;
    }

    // extension past R while the slope stays bounded away from zero; w moves at
    // rate |w'(R)|, so the span and spacing follow alpha
    const double rate = std::abs(-cfg.K * ipow(alpha, p) - alpha);
    const double span = std::min(0.5 * cfg.window_width(), 0.25 * std::abs(ipow(alpha, p)) / rate);
    out.h_right = std::min(h, span / 32.0);
    std::size_t m = std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(span / out.h_right)));
    Window right = solve_window_adaptive(f, cfg, alpha, 0.0, ipow(alpha, p), m, out.h_right, +1, out.splits);
    const double limit = 0.5 * std::abs(ipow(alpha, p));
    std::size_t keep = 1;
    while (keep <= m && right.w[keep] < 0.0 && std::abs(right.w[keep]) >= limit) ++keep;
    if (keep < 6) {
        raise(ErrorCode::ConvergenceFailure, "barrier extension past R collapsed below five cells");
    }
    out.phi_r.assign(right.phi.begin(), right.phi.begin() + static_cast<std::ptrdiff_t>(keep));
    out.w_r.assign(right.w.begin(), right.w.begin() + static_cast<std::ptrdiff_t>(keep));
    out.status = Attempt::Success;
    return out;
}

}  // namespace

double default_slope_cap(const BarrierConfig& cfg, const NonlinearitySpec& f, double alpha) {
    const double top = std::min(1.0, f.domain_cap());
    const double Fa = F_alpha(f, alpha, top);
    if (cfg.op == Operator::L1) {
        const double e = std::exp(4.0 / 3.0 * cfg.K * cfg.R / 2.0);
        return std::pow(e * std::pow(alpha, 4) + 4.0 / 3.0 * e * Fa, 0.25) + 1.0;
    }
    const double e = std::exp(cfg.K * cfg.R);
    return std::sqrt(e * alpha * alpha + 2.0 * e * Fa) + 1.0;
}

BarrierResult build_barrier(const BarrierConfig& cfg, const NonlinearitySpec& f) {
    cfg.validate();
    BarrierResult result;
    const double top = std::min(1.0, f.domain_cap());
    result.hypothesis =
        classify_integral(f, IntegrandSelector::inverse_root(cfg.op == Operator::L1 ? 4.0 : 2.0), top)
            .verdict;

    const std::size_t N = cfg.grid_resolution;
    const double h = 0.5 * cfg.R / static_cast<double>(N);
    const std::size_t window_steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.window_width() / h)));
    const double alpha_floor = cfg.alpha_floor_ratio * std::abs(cfg.alpha_init);
    const int p = power_of(cfg.op);

    double alpha = cfg.alpha_init;
    int shrinks = 0;
    for (;;) {
        const double M2 = cfg.M2.value_or(default_slope_cap(cfg, f, alpha));
        AttemptOutput out = attempt(cfg, f, alpha, M2, h, window_steps);
        result.window_splits += out.splits;
        if (out.status == Attempt::Success) {
            std::vector<double> grid, values, w;
            for (std::size_t i = 0; i <= N; ++i) {
                grid.push_back(0.5 * cfg.R + h * static_cast<double>(i));
                values.push_back(out.phi[i]);
                w.push_back(out.w[i]);
            }
            grid[N] = cfg.R;
            for (std::size_t j = 1; j < out.phi_r.size(); ++j) {
                grid.push_back(cfg.R + out.h_right * static_cast<double>(j));
                values.push_back(out.phi_r[j]);
                w.push_back(out.w_r[j]);
            }
            Profile prof;
            prof.provenance = Provenance::Barrier;
            prof.grid = std::move(grid);
            prof.values = std::move(values);
            prof.first_derivative.resize(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) {
                prof.first_derivative[i] = numerics::signed_root(w[i], p);
            }
            // curvature from finite differences of the slope, so residuals test the map;
            // f(max(phi, 0)) has a kink at R, so each side is differenced separately
            const std::span<const double> x(prof.grid), y(prof.first_derivative);
            prof.second_derivative = numerics::derivative(x.first(N + 1), y.first(N + 1));
            const auto right = numerics::derivative(x.subspan(N), y.subspan(N));
            prof.second_derivative.insert(prof.second_derivative.end(), right.begin() + 1, right.end());
            // fourth-order one-sided slope derivative at R from the left
            const auto& d = prof.first_derivative;
            prof.second_derivative[N] = (25.0 * d[N] - 48.0 * d[N - 1] + 36.0 * d[N - 2] -
                                         16.0 * d[N - 3] + 3.0 * d[N - 4]) / (12.0 * h);
            prof.values[N] = 0.0;
            prof.first_derivative[N] = alpha;

            result.profile = std::move(prof);
            result.alpha = alpha;
            result.root_node = N;
            result.epsilon1 = result.profile.back() - cfg.R;
            result.shrink_iterations = shrinks;
            result.slope_cap = M2;
            result.residual = verify_barrier(result, cfg, f);
            return result;
        }
        alpha *= 0.5;
        ++shrinks;
        if (std::abs(alpha) < alpha_floor) {
            std::ostringstream os;
            os << "no barrier found down to |alpha| = " << std::abs(alpha) << " after " << shrinks
               << " halvings; the divergence condition likely fails (classifier: "
               << to_string(result.hypothesis) << ") or the resolution is too coarse";
            raise(ErrorCode::NoBarrier, os.str());
        }
    }
}

ResidualReport verify_barrier(const BarrierResult& result, const BarrierConfig& cfg,
                              const NonlinearitySpec& f) {
    const Profile& prof = result.profile;
    const double alpha = result.alpha;
    ResidualOptions opts;
    opts.tolerance = cfg.residual_tolerance;
    opts.alpha = alpha;
    ResidualReport rep = residual_report(ResidualTarget::BarrierOde, prof, f, GradientInput{cfg.K},
                                         cfg.op, opts);

    const std::size_t iR = prof.nearest(cfg.R);
    if (std::abs(prof.values[iR]) > cfg.terminal_tolerance) {
        rep.add_violation({"terminal_value", iR, prof.grid[iR], prof.values[iR]});
    }
    if (std::abs(prof.first_derivative[iR] - alpha) > cfg.terminal_tolerance * std::max(1.0, std::abs(alpha))) {
        rep.add_violation({"terminal_slope", iR, prof.grid[iR], prof.first_derivative[iR] - alpha});
    }

    const bool l1 = cfg.op == Operator::L1;
    const double energy_factor =
        l1 ? std::exp(4.0 / 3.0 * cfg.K * cfg.R / 2.0) : std::exp(cfg.K * cfg.R);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double t = prof.grid[i];
        const double v = prof.values[i];
        const double d1 = prof.first_derivative[i];
        const bool interior = t > 0.5 * cfg.R && t < cfg.R && i != iR;
        if (interior) {
            if (!(v > 0.0 && v < cfg.epsilon)) rep.add_violation({"value_bounds", i, t, v});
            if (!(d1 < 0.0)) rep.add_violation({"slope_sign", i, t, d1});
        }
        if (t > 0.5 * cfg.R && t <= cfg.R) {
            const double Fa = F_alpha(f, alpha, v);
            const double lhs = l1 ? d1 * d1 * d1 * d1 : d1 * d1;
            const double rhs = l1 ? energy_factor * (std::pow(alpha, 4) + 4.0 / 3.0 * Fa)
                                  : energy_factor * (alpha * alpha + 2.0 * Fa);
            if (lhs > rhs * (1.0 + cfg.energy_tolerance)) {
                rep.add_violation({"energy_inequality", i, t, lhs - rhs});
            }
        }
    }
    rep.finalize();
    return rep;
}

}  // namespace ilab
