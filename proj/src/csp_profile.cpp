// SPDX-License-Identifier: MIT
#include "ilab/csp_profile.hpp"

#include "ilab/implicit_primitive.hpp"
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ilab {

namespace {

bool is_l1(Operator op) { return op == Operator::L1; }
int power_of(Operator op) { return is_l1(op) ? 3 : 1; }
double kernel_constant(Operator op) { return is_l1(op) ? 6.0 : 2.0; }

double h_of(const NonlinearitySpec& f, double kappa, double x) {
    return 4.0 * kappa * f.value(std::clamp(x, 0.0, f.domain_cap()));
}

double max_difference_quotient(std::span<const double> x, std::span<const double> y) {
    double worst = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        worst = std::max(worst, std::abs(y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    }
    return worst;
}

}  // namespace

void CspConfig::validate() const {
    if (!(K > 0.0)) raise(ErrorCode::InvariantViolation, "CSP construction needs K > 0");
    if (!(kappa > 0.0)) raise(ErrorCode::InvariantViolation, "CSP construction needs kappa > 0");
    if (delta && !(*delta > 0.0)) raise(ErrorCode::InvariantViolation, "delta must be positive");
    if (delta && 8.0 * std::exp(-power_of(op) * K * *delta) < 1.0) {
        std::ostringstream os;
        os << "delta = " << *delta << " violates 8 exp(-" << power_of(op) << " K delta) >= 1";
        raise(ErrorCode::InvariantViolation, os.str());
    }
    if (psi_nodes < 5 || phi_nodes < 5) raise(ErrorCode::InvariantViolation, "CSP grids need >= 5 nodes");
    if (max_iterations < 1) raise(ErrorCode::InvariantViolation, "max_iterations must be positive");
}

double csp_sup_h(const NonlinearitySpec& f, double kappa) {
    return h_of(f, kappa, std::min(1.0, f.domain_cap()));
}

double default_csp_delta(const CspConfig& cfg, double M, double R) {
    if (is_l1(cfg.op)) {
        const double by_kernel = std::log(8.0) / (3.0 * cfg.K);
        const double by_sup = std::pow(4.0 / (3.0 * std::cbrt(6.0 * M)), 0.75);
        return std::min({by_kernel, by_sup, R});
    }
    const double by_kernel = std::log(8.0) / cfg.K;
    const double by_sup = 1.0 / std::sqrt(M);
    return std::min({by_kernel, by_sup, R});
}

double csp_lipschitz_bound(Operator op, double M, double delta) {
    return is_l1(op) ? std::cbrt(6.0 * M * delta) : 2.0 * M * delta;
}

SupportRadius compute_support_radius(const NonlinearitySpec& f, double kappa, Operator op,
                                     std::size_t nodes) {
    if (!(kappa > 0.0)) raise(ErrorCode::InvariantViolation, "kappa must be positive");
    if (nodes < 5) raise(ErrorCode::InvariantViolation, "comparison profile needs >= 5 nodes");
    const bool l1 = is_l1(op);
    const auto sel = l1 ? IntegrandSelector::inverse_root(4.0, 4.0 * kappa)
                        : IntegrandSelector::inverse_root(2.0, 2.0 * kappa);
    const auto verdict = classify_integral(f, sel, std::min(1.0, f.domain_cap()));
    if (verdict.verdict != Verdict::Converges) {
        raise(ErrorCode::DivergentIntegral,
              std::string("support radius is infinite (classifier: ") + to_string(verdict.verdict) + ")");
    }
    const auto H = [&](double s) { return 4.0 * kappa * f.primitive(s); };
    ImplicitPrimitive T(
        [&](double s) { return l1 ? std::pow(H(s), -0.25) : std::sqrt(2.0 / H(s)); });
    T.extend_to(1.0);

    SupportRadius out;
    out.R = T.total();
    Profile& p = out.phi;
    p.provenance = Provenance::Csp;
    p.grid = numerics::linspace(0.0, out.R, nodes);
    p.values.resize(nodes);
    p.first_derivative.resize(nodes);
    p.second_derivative.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double v = i == 0 ? 1.0 : (i + 1 == nodes ? 0.0 : T.inverse(out.R - p.grid[i]));
        p.values[i] = v;
        if (v <= 0.0) continue;
        const double Hv = H(v);
        const double hv = h_of(f, kappa, v);
        p.first_derivative[i] = l1 ? -std::pow(Hv, 0.25) : -std::sqrt(0.5 * Hv);
        p.second_derivative[i] = l1 ? hv / (4.0 * std::sqrt(Hv)) : 0.25 * hv;
    }
    p.grid.back() = out.R;
    // curvature at the vanishing end by linear extrapolation
    const std::size_t n = nodes - 1;
    p.second_derivative[n] = std::max(0.0, 2.0 * p.second_derivative[n - 1] - p.second_derivative[n - 2]);
    return out;
}

std::vector<double> apply_csp_map(const NonlinearitySpec& f, const CspConfig& cfg,
                                  std::span<const double> s, std::span<const double> g,
                                  std::vector<double>* slope) {
    const std::size_t n = s.size();
    if (g.size() != n || n < 2) raise(ErrorCode::InvariantViolation, "map needs matching samples");
    const int p = power_of(cfg.op);
    const double c = kernel_constant(cfg.op);
    const double R = s[n - 1];
    std::vector<double> q(n), root(n), out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        q[j] = c * std::exp(p * cfg.K * (R - s[j])) * h_of(f, cfg.kappa, g[j]);
    }
    // inner integral from the right end; e^{pK(s-z)} = e^{pK(s-R)} e^{pK(R-z)}
    double B = 0.0;
    root[n - 1] = 0.0;
    for (std::size_t j = n - 1; j-- > 0;) {
        B += 0.5 * (s[j + 1] - s[j]) * (q[j] + q[j + 1]);
        const double W = std::exp(p * cfg.K * (s[j] - R)) * B;
        root[j] = numerics::signed_root(W, p);
    }
    for (std::size_t j = n - 1; j-- > 0;) {
        out[j] = out[j + 1] + 0.5 * (s[j + 1] - s[j]) * (root[j] + root[j + 1]);
    }
    if (slope) {
        slope->resize(n);
        for (std::size_t j = 0; j < n; ++j) (*slope)[j] = -root[j];
    }
    return out;
}

PsiReport build_psi(const NonlinearitySpec& f, const CspConfig& cfg, double R, const Profile& phi) {
    cfg.validate();
    const double M = csp_sup_h(f, cfg.kappa);
    PsiReport rep;
    double delta = cfg.delta.value_or(default_csp_delta(cfg, M, R));
    if (delta > R) {
        std::ostringstream os;
        os << "delta = " << delta << " exceeds the support radius " << R;
        raise(ErrorCode::InvariantViolation, os.str());
    }
    rep.requested_delta = delta;

    for (int attempt = 0;; ++attempt) {
        const std::vector<double> s = numerics::linspace(R - delta, R, cfg.psi_nodes);
        std::vector<double> base(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) base[i] = phi.value_at(std::clamp(s[i], phi.front(), phi.back()));
        base.back() = 0.0;
        const double bound = csp_lipschitz_bound(cfg.op, M, delta);

        std::vector<double> g = base, slope;
        bool sup_exceeded = false;
        double update = std::numeric_limits<double>::infinity();
        int it = 0;
        while (it < cfg.max_iterations) {
            std::vector<double> next = apply_csp_map(f, cfg, s, g, &slope);
            ++it;
            double gap = std::numeric_limits<double>::infinity();
            double sup = 0.0;
            update = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                gap = std::min(gap, next[i] - base[i]);
                sup = std::max(sup, std::abs(next[i]));
                update = std::max(update, std::abs(next[i] - g[i]));
            }
            if (it == 1) rep.first_step_dominates = gap >= -cfg.invariant_tolerance;
            if (gap < -cfg.invariant_tolerance) {
                std::ostringstream os;
                os << "iterate " << it << " drops below the comparison profile by " << -gap;
                raise(ErrorCode::InvariantViolation, os.str());
            }
            const double lip = max_difference_quotient(s, next);
            if (lip > bound + cfg.lipschitz_slack) {
                std::ostringstream os;
                os << "iterate " << it << " has Lipschitz constant " << lip << " > " << bound;
                raise(ErrorCode::InvariantViolation, os.str());
            }
            g = std::move(next);
            if (sup > 1.0 + cfg.invariant_tolerance) {
                sup_exceeded = true;
                break;
            }
            if (update <= cfg.fixed_point_tolerance) break;
        }
        if (sup_exceeded) {
            if (attempt >= 60) raise(ErrorCode::InvariantViolation, "sup bound unreachable by shrinking delta");
            delta *= 0.9;
            rep.delta_shrunk = true;
            continue;
        }
        if (update > cfg.fixed_point_tolerance) {
            std::ostringstream os;
            os << "psi iteration stalled at update " << update << " after " << it << " iterations";
            raise(ErrorCode::ConvergenceFailure, os.str());
        }

        Profile psi;
        psi.provenance = Provenance::Csp;
        psi.grid = s;
        psi.values = g;
        psi.first_derivative = slope;
        psi.second_derivative = numerics::derivative(s, slope);
        psi.values.back() = 0.0;
        psi.first_derivative.back() = 0.0;

        rep.psi = std::move(psi);
        rep.delta = delta;
        rep.iterations = it;
        rep.final_update = update;
        rep.lipschitz_bound = bound;
        rep.lipschitz_constant = max_difference_quotient(s, g);
        rep.sup_norm = 0.0;
        rep.min_domination_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.size(); ++i) {
            rep.sup_norm = std::max(rep.sup_norm, std::abs(g[i]));
            rep.min_domination_gap = std::min(rep.min_domination_gap, g[i] - base[i]);
        }
        return rep;
    }
}

CompactSolution assemble_compact_solution(const Profile& psi, const CspConfig& cfg, double R,
                                          const NonlinearitySpec& f) {
    const double delta = R - psi.front();
    const double r_circ = R - delta - 1.0;
    if (!(r_circ > 0.0)) {
        std::ostringstream os;
        os << "R - delta = " << R - delta
           << " <= 1: the annulus does not fit outside the unit ball; increase lambda to shrink R";
        raise(ErrorCode::Geometry, os.str());
    }
    if (std::abs(psi.values.back()) > kGluingTolerance ||
        std::abs(psi.first_derivative.back()) > kGluingTolerance) {
        raise(ErrorCode::Gluing, "psi does not vanish to first order at R");
    }
    CompactSolution out;
    out.r_circ = r_circ;
    Profile v;
    v.provenance = Provenance::Csp;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        v.grid.push_back(psi.grid[i] - r_circ);
        v.values.push_back(psi.values[i]);
        v.first_derivative.push_back(psi.first_derivative[i]);
        v.second_derivative.push_back(psi.second_derivative[i]);
    }
    v.grid.front() = 1.0;
    const double edge = 1.0 + delta;
    v.grid.back() = edge;
    const double h = delta / static_cast<double>(psi.size() - 1);
    for (std::size_t k = 1; k < psi.size(); ++k) {
        v.grid.push_back(edge + h * static_cast<double>(k));
        v.values.push_back(0.0);
        v.first_derivative.push_back(0.0);
        v.second_derivative.push_back(0.0);
    }
    v.support_edge = edge;
    v.validate();

    ResidualOptions opts;
    opts.tolerance = cfg.residual_tolerance;
    opts.lo = 1.0;
    opts.hi = edge;
    out.residual = residual_report(ResidualTarget::CompactSolution, v, f, GradientInput{cfg.K}, cfg.op, opts);
    out.supersolution = residual_report(ResidualTarget::AbsorptionSupersolution, v, f,
                                        GradientInput{cfg.K}, cfg.op, opts);
    out.viscosity_clause = kink_viscosity_check(v, f);
    out.profile = std::move(v);
    return out;
}

CspResult run_csp_pipeline(const NonlinearitySpec& f, const CspConfig& cfg) {
    cfg.validate();
    CspResult res;
    SupportRadius sr = compute_support_radius(f, cfg.kappa, cfg.op, cfg.phi_nodes);
    res.support_radius = sr.R;
    ResidualOptions phi_opts;
    phi_opts.tolerance = cfg.residual_tolerance;
    phi_opts.kappa = cfg.kappa;
    res.phi_residual = residual_report(ResidualTarget::ComparisonProfileOde, sr.phi, f,
                                       GradientInput{GradientTermSpec::none(cfg.op)}, cfg.op, phi_opts);
    res.phi = std::move(sr.phi);
    res.psi = build_psi(f, cfg, res.support_radius, res.phi);
    ResidualOptions psi_opts;
    psi_opts.tolerance = cfg.residual_tolerance;
    psi_opts.kappa = cfg.kappa;
    res.psi_residual = residual_report(ResidualTarget::CspOde, res.psi.psi, f, GradientInput{cfg.K},
                                       cfg.op, psi_opts);
    res.r_circ = res.support_radius - res.psi.delta - 1.0;
    res.lipschitz_bound = res.psi.lipschitz_bound;
    res.iterations = res.psi.iterations;
    try {
        res.assembled = assemble_compact_solution(res.psi.psi, cfg, res.support_radius, f);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Geometry) throw;
        res.geometry_error = e.what();
    }
    res.pass = res.phi_residual.pass && res.psi_residual.pass && res.assembled &&
               res.assembled->residual.pass && res.assembled->supersolution.pass &&
               res.assembled->viscosity_clause.holds;
    return res;
}

}  // namespace ilab
