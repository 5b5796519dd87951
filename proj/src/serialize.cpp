// SPDX-License-Identifier: MIT
#include "ilab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ilab {

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "\"nan\"";
    if (std::isinf(x)) return x > 0 ? "\"infinity\"" : "\"-infinity\"";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

void dump(const Json& j, int indent, int depth, std::ostringstream& os) {
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) { os << "{}"; return; }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                os << pad << Json(it.key()).dump() << sep;
                dump(it.value(), indent, depth + 1, os);
            }
            os << close << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) { os << "[]"; return; }
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',';
                first = false;
                os << pad;
                dump(v, indent, depth + 1, os);
            }
            os << close << ']';
            return;
        }
        case Json::value_t::number_float: os << format_double(j.get<double>()); return;
        default: os << j.dump(); return;
    }
}

Json samples(const std::vector<double>& v) { return Json(v); }

Json violation_json(const Violation& v) {
    return {{"check", v.check}, {"node", v.node}, {"location", v.location}, {"value", v.value}};
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    dump(j, indent, 0, os);
    return os.str();
}

Json to_json(const Profile& p, bool include_samples) {
    Json j{{"provenance", to_string(p.provenance)},
           {"nodes", p.size()},
           {"start", p.size() ? p.front() : 0.0},
           {"end", p.size() ? p.back() : 0.0}};
    j["support_edge"] = p.support_edge ? Json(*p.support_edge) : Json(nullptr);
    if (include_samples) {
        j["grid"] = samples(p.grid);
        j["values"] = samples(p.values);
        j["first_derivative"] = samples(p.first_derivative);
        j["second_derivative"] = samples(p.second_derivative);
    }
    return j;
}

Json to_json(const ResidualReport& r, bool include_samples) {
    Json j{{"target", r.target},
           {"sign_mode", to_string(r.sign_mode)},
           {"tolerance", r.tolerance},
           {"pass", r.pass},
           {"max_abs_residual", r.max_abs_residual},
           {"max_violation", r.max_violation},
           {"worst_node", r.worst_node},
           {"worst_location", r.worst_location},
           {"nodes_evaluated", r.grid.size()},
           {"critical_nodes_skipped", r.critical_nodes_skipped}};
    Json v = Json::array();
    for (const auto& x : r.violations) v.push_back(violation_json(x));
    j["violations"] = v;
    if (include_samples) {
        j["grid"] = samples(r.grid);
        j["residuals"] = samples(r.residuals);
    }
    return j;
}

Json to_json(const ClassificationResult& c) {
    return {{"verdict", to_string(c.verdict)},
            {"exponent", c.exponent},
            {"integral", c.integral},
            {"band", {c.band.first, c.band.second}},
            {"fit_residual", c.fit_residual},
            {"zero_on_interval", c.zero_on_interval},
            {"critical_rule", c.critical},
            {"selector", c.selector}};
}

Json to_json(const KinkReport& k) {
    return {{"holds", k.holds},
            {"value_vanishes", k.value_vanishes},
            {"slope_vanishes", k.slope_vanishes},
            {"absorption_vanishes", k.absorption_vanishes},
            {"edge", k.edge},
            {"edge_value", k.edge_value},
            {"edge_slope", k.edge_slope},
            {"zero_side_max", k.zero_side_max},
            {"tolerance", k.tolerance},
            {"failing_condition", k.failing_condition}};
}

Json to_json(const CounterexampleScan& s) {
    return {{"alpha", s.alpha}, {"r_max", s.r_max}, {"nodes", s.nodes},
            {"min_value", s.min_value}, {"argmin", s.argmin}, {"positive", s.min_value > 0.0}};
}

Json to_json(const BarrierResult& b) {
    return {{"alpha", b.alpha},
            {"epsilon1", b.epsilon1},
            {"shrink_iterations", b.shrink_iterations},
            {"window_splits", b.window_splits},
            {"slope_cap", b.slope_cap},
            {"hypothesis_verdict", to_string(b.hypothesis)},
            {"profile", to_json(b.profile)},
            {"residual", to_json(b.residual)}};
}

Json to_json(const RCircReport& r) {
    return {{"r_circ", r.r_circ},
            {"node", r.node},
            {"gradient_bound_holds", r.gradient_bound_holds},
            {"curvature_bound_holds", r.curvature_bound_holds},
            {"gradient_bound_first_failure", r.gradient_bound_first_failure},
            {"curvature_bound_first_failure", r.curvature_bound_first_failure}};
}

Json to_json(const PsiReport& p) {
    return {{"delta", p.delta},
            {"requested_delta", p.requested_delta},
            {"delta_shrunk", p.delta_shrunk},
            {"iterations", p.iterations},
            {"final_update", p.final_update},
            {"lipschitz_bound", p.lipschitz_bound},
            {"lipschitz_constant", p.lipschitz_constant},
            {"sup_norm", p.sup_norm},
            {"min_domination_gap", p.min_domination_gap},
            {"first_step_dominates", p.first_step_dominates},
            {"profile", to_json(p.psi)}};
}

Json to_json(const CompactSolution& c) {
    return {{"r_circ", c.r_circ},
            {"profile", to_json(c.profile)},
            {"residual", to_json(c.residual)},
            {"supersolution", to_json(c.supersolution)},
            {"viscosity_clause", to_json(c.viscosity_clause)}};
}

Json to_json(const CspResult& c) {
    Json j{{"support_radius", c.support_radius},
           {"phi", to_json(c.phi)},
           {"phi_residual", to_json(c.phi_residual)},
           {"psi", to_json(c.psi)},
           {"psi_residual", to_json(c.psi_residual)},
           {"r_circ", c.r_circ},
           {"lipschitz_bound", c.lipschitz_bound},
           {"iterations", c.iterations},
           {"pass", c.pass}};
    j["assembled"] = c.assembled ? to_json(*c.assembled) : Json(nullptr);
    j["geometry_error"] = c.geometry_error.empty() ? Json(nullptr) : Json(c.geometry_error);
    return j;
}

Json to_json(const SolveReport& s) {
    return {{"iterations", s.iterations},
            {"final_update_norm", s.final_update_norm},
            {"residual_norm", s.residual_norm},
            {"tolerance", s.tolerance},
            {"converged", s.converged}};
}

Json to_json(const GridFunction& u, bool include_samples) {
    Json j{{"h", u.h}, {"nodes", u.size()}};
    if (const auto* g = std::get_if<IntervalGeometry>(&u.geometry)) {
        j["geometry"] = {{"kind", "interval"}, {"a", g->a}, {"b", g->b}, {"n", g->n}};
    } else {
        const auto& b = std::get<BoxGeometry>(u.geometry);
        j["geometry"] = {{"kind", "box"}, {"x0", b.x0}, {"x1", b.x1}, {"y0", b.y0},
                         {"y1", b.y1}, {"nx", b.nx}, {"ny", b.ny}};
    }
    if (include_samples) j["values"] = samples(u.values);
    return j;
}

Json to_json(const ComparisonReport& c) {
    Json j{{"hypotheses_hold", c.hypotheses_hold},
           {"conclusion_holds", c.conclusion_holds},
           {"hypothesis_violations", c.hypothesis_violations},
           {"conclusion_violations", c.conclusion_violations},
           {"realized_gap", c.realized_gap},
           {"min_margin", c.min_margin}};
    j["first_hypothesis_violation"] =
        c.hypothesis_violation ? violation_json(*c.hypothesis_violation) : Json(nullptr);
    j["first_conclusion_violation"] =
        c.conclusion_violation ? violation_json(*c.conclusion_violation) : Json(nullptr);
    return j;
}

Json to_json(const DeadCore& d) { return {{"width", d.width}, {"nodes", d.nodes.size()}}; }

Json to_json(const ExperimentReport& e) {
    return {{"q", e.spec.q},
            {"lambda", e.spec.lambda},
            {"operator", to_string(e.spec.op)},
            {"resolution", e.spec.resolution},
            {"h", e.h},
            {"threshold", e.threshold},
            {"dead_core_width", e.dead_core_width},
            {"dead_core_nodes", e.dead_core_nodes},
            {"interior_min", e.interior_min},
            {"midpoint_value", e.midpoint_value},
            {"classification", to_json(e.classification)},
            {"solve", to_json(e.solve)}};
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::Usage, "cannot write " + path.string());
    out << "t,phi,dphi,d2phi\n";
    char buf[128];
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", p.grid[i], p.values[i],
                      p.first_derivative[i], p.second_derivative[i]);
        out << buf;
    }
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& u) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::Usage, "cannot write " + path.string());
    out << "node,x,value\n";
    char buf[96];
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", i, u.coordinate(i), u.values[i]);
        out << buf;
    }
}

}  // namespace ilab
