// SPDX-License-Identifier: MIT
#include "ilab/deadcore.hpp"

#include "ilab/implicit_primitive.hpp"
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ilab {

namespace {

double op_value(Operator op, double d1, double d2) {
    return op == Operator::L1 ? d1 * d1 * d2 : d2;
}

}  // namespace

Profile build_deadcore_profile(const NonlinearitySpec& f, const GradientTermSpec& g, double horizon,
                               const DeadcoreConfig& cfg) {
    if (!(horizon > 0.0)) raise(ErrorCode::Domain, "dead-core horizon must be positive");
    if (cfg.nodes < 4) raise(ErrorCode::InvariantViolation, "dead-core profile needs >= 4 nodes");
    const auto verdict = classify_integral(f, IntegrandSelector::gamma_inverse(g, 0.25), 1.0);
    if (verdict.verdict != Verdict::Converges) {
        raise(ErrorCode::DivergentIntegral,
              std::string("int_0^1 ds / Gamma^-1(F(s)/4) is not finite (classifier: ") +
                  to_string(verdict.verdict) + ")");
    }

    ImplicitPrimitive T([&](double s) { return 1.0 / invert_Gamma(g, 0.25 * f.primitive(s)); },
                        cfg.phi_min, cfg.per_decade);
    if (!T.extend_until(horizon, f.domain_cap())) {
        std::ostringstream os;
        os << "horizon " << horizon << " lies beyond the tabulated range (t reaches " << T.total()
           << " at the value cap " << f.domain_cap() << ")";
        raise(ErrorCode::Domain, os.str());
    }

    Profile p;
    p.provenance = Provenance::Deadcore;
    p.grid = numerics::linspace(0.0, horizon, cfg.nodes);
    const std::size_t n = p.grid.size();
    p.values.resize(n);
    p.first_derivative.resize(n);
    p.second_derivative.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = i == 0 ? 0.0 : T.inverse(p.grid[i]);
        p.values[i] = phi;
        p.first_derivative[i] = i == 0 ? 0.0 : invert_Gamma(g, 0.25 * f.primitive(phi));
    }
    // phi'' = f(phi) phi' / (4 Gamma'(phi')), from differentiating the identity
    for (std::size_t i = 1; i < n; ++i) {
        const double d1 = p.first_derivative[i];
        p.second_derivative[i] = f.value(p.values[i]) * d1 / (4.0 * eval_Gamma_derivative(g, d1));
    }
    const double extrapolated = 2.0 * p.second_derivative[1] - p.second_derivative[2];
    p.second_derivative[0] = std::max(0.0, extrapolated);
    return p;
}

double deadcore_identity_residual(const Profile& profile, const NonlinearitySpec& f,
                                  const GradientTermSpec& g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.grid[i] <= 0.0) continue;
        const double rhs = 0.25 * f.primitive(profile.values[i]);
        const double lhs = eval_Gamma(g, profile.first_derivative[i]);
        const double scale = std::max(std::abs(rhs), std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

RCircReport determine_r_circ(const Profile& profile, const NonlinearitySpec& f,
                             const GradientTermSpec& g) {
    RCircReport rep;
    const std::size_t n = profile.size();
    rep.inequality.assign(n, 0.0);
    std::size_t last_good = 0;
    bool broken = false;
    for (std::size_t i = 1; i < n; ++i) {
        const double d1 = profile.first_derivative[i];
        const double d2 = profile.second_derivative[i];
        const double fv = f.value(std::min(profile.values[i], f.domain_cap()));
        const double G = gradient_term(GradientInput{g}, g.op, d1);
        const double opv = op_value(g.op, d1, d2);
        rep.inequality[i] = opv + G - 0.5 * fv;
        if (broken) continue;
        if (rep.inequality[i] > 0.0) {
            broken = true;
            continue;
        }
        last_good = i;
        if (G > 0.25 * fv && rep.gradient_bound_first_failure == 0) rep.gradient_bound_first_failure = i;
        if (opv > 0.25 * fv && rep.curvature_bound_first_failure == 0) rep.curvature_bound_first_failure = i;
    }
    if (last_good == 0) {
        raise(ErrorCode::NoValidRadius,
              "dead-core inequality fails at the first interior node; refine the grid or shrink the horizon");
    }
    rep.node = last_good;
    rep.r_circ = profile.grid[last_good];
    rep.gradient_bound_holds = rep.gradient_bound_first_failure == 0;
    rep.curvature_bound_holds = rep.curvature_bound_first_failure == 0;
    return rep;
}

RadialSupersolution assemble_radial_supersolution(const Profile& profile, double R, double r_circ,
                                                  const NonlinearitySpec& f) {
    if (!(R > 0.0)) raise(ErrorCode::Domain, "inner radius must be positive");
    if (!(r_circ > 0.0) || r_circ > profile.back() * (1.0 + 1e-14) || profile.front() != 0.0) {
        raise(ErrorCode::Domain, "r_circ must lie in (0, horizon] of a profile starting at t = 0");
    }
    // nodes t_j <= r_circ, with r_circ itself appended if it is not a node
    std::vector<double> t, v, d1, d2;
    for (std::size_t i = 0; i < profile.size() && profile.grid[i] <= r_circ * (1.0 + 1e-14); ++i) {
        t.push_back(profile.grid[i]);
        v.push_back(profile.values[i]);
        d1.push_back(profile.first_derivative[i]);
        d2.push_back(profile.second_derivative[i]);
    }
    if (r_circ - t.back() > 1e-12 * r_circ) {
        t.push_back(r_circ);
        v.push_back(profile.value_at(r_circ));
        d1.push_back(profile.slope_at(r_circ));
        d2.push_back(profile.curvature_at(r_circ));
    }
    if (std::abs(v.front()) > kGluingTolerance || std::abs(d1.front()) > kGluingTolerance) {
        std::ostringstream os;
        os << "C1 gluing fails at the support edge: value " << v.front() << ", slope " << d1.front();
        raise(ErrorCode::Gluing, os.str());
    }

    Profile out;
    out.provenance = Provenance::Deadcore;
    const double edge = R + r_circ;
    for (std::size_t j = t.size(); j-- > 0;) {
        out.grid.push_back(edge - t[j]);
        out.values.push_back(v[j]);
        out.first_derivative.push_back(-d1[j]);
        out.second_derivative.push_back(d2[j]);
    }
    out.grid.front() = R;
    out.grid.back() = edge;
    out.values.back() = 0.0;
    out.first_derivative.back() = 0.0;
    // zero extension with the profile spacing
    const double h = std::max(profile.grid[1] - profile.grid[0], 1e-12);
    const std::size_t ext = std::max<std::size_t>(3, t.size() / 10);
    for (std::size_t k = 1; k <= ext; ++k) {
        out.grid.push_back(edge + h * static_cast<double>(k));
        out.values.push_back(0.0);
        out.first_derivative.push_back(0.0);
        out.second_derivative.push_back(0.0);
    }
    out.support_edge = edge;
    out.validate();

    RadialSupersolution result;
    result.viscosity_clause = kink_viscosity_check(out, f);
    result.profile = std::move(out);
    return result;
}

}  // namespace ilab
