// SPDX-License-Identifier: MIT
#include "ilab/cli.hpp"

#include "ilab/serialize.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ilab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    return parts;
}

double to_number(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        raise(ErrorCode::Usage, "not a number in " + context + ": '" + s + "'");
    }
}

/// "q=1,lambda=2" -> (q, lambda); lambda defaults to 1.
std::pair<double, double> parse_power_args(const std::string& s, const std::string& context) {
    std::optional<double> q;
    double lambda = 1.0;
    for (const auto& kv : split(s, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) raise(ErrorCode::Usage, "expected key=value in " + context);
        const std::string key = kv.substr(0, eq);
        const double v = to_number(kv.substr(eq + 1), context);
        if (key == "q") q = v;
        else if (key == "lambda") lambda = v;
        else raise(ErrorCode::Usage, "unknown key '" + key + "' in " + context);
    }
    if (!q) raise(ErrorCode::Usage, "missing q in " + context);
    return {*q, lambda};
}

MonotoneFunction read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::Usage, "cannot read table " + path);
    std::vector<double> s, f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (cols.size() < 2) raise(ErrorCode::Usage, "table rows need two columns: " + line);
        if (s.empty() && f.empty() && !std::isdigit(static_cast<unsigned char>(cols[0][0])) &&
            cols[0][0] != '-' && cols[0][0] != '.') {
            continue;  // header
        }
        s.push_back(to_number(cols[0], path));
        f.push_back(to_number(cols[1], path));
    }
    return MonotoneFunction::table(std::move(s), std::move(f));
}

// ---- output -------------------------------------------------------------

struct Output {
    std::ostream& out;
    std::string path;  // empty: stdout

    std::filesystem::path sibling(const std::string& suffix) const {
        std::filesystem::path p(path);
        return p.parent_path() / (p.stem().string() + "_" + suffix + ".csv");
    }
    bool has_file() const { return !path.empty(); }

    void emit(const Json& report) const {
        const std::string text = dump_json(report) + "\n";
        if (path.empty()) {
            out << text;
            return;
        }
        std::ofstream f(path);
        if (!f) raise(ErrorCode::Usage, "cannot write " + path);
        f << text;
    }
};

Json envelope(const std::string& sub) { return Json{{"schema", kSchemaVersion}, {"subcommand", sub}}; }

int exit_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Usage:
        case ErrorCode::Domain:
        case ErrorCode::InvariantViolation:
        case ErrorCode::DivergentIntegral: return kExitUsage;
        default: return kExitVerificationFailure;
    }
}

GradientTermSpec make_gradient(const std::string& spec, Operator op) {
    return GradientTermSpec{parse_function_spec(spec), op};
}

// ---- options ------------------------------------------------------------

struct Common {
    std::string f = "power:q=1";
    std::string g = "zero";
    std::string op = "L1";
    std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_g) {
    sub->add_option("--f", c.f, "absorption term f")->capture_default_str();
    if (with_g) sub->add_option("--g", c.g, "gradient term G")->capture_default_str();
    sub->add_option("--operator", c.op, "L1 (infinity Laplacian) or L0 (normalized)")
        ->check(CLI::IsMember({"L1", "L0"}))
        ->capture_default_str();
    sub->add_option("--out", c.out, "JSON output file; CSVs are written next to it");
}

}  // namespace

MonotoneFunction parse_function_spec(const std::string& text) {
    if (text == "zero") return MonotoneFunction::zero();
    const auto colon = text.find(':');
    if (colon == std::string::npos) raise(ErrorCode::Usage, "bad function spec '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (kind == "power") {
        const auto [q, lambda] = parse_power_args(rest, text);
        return MonotoneFunction::power_law(q, lambda);
    }
    if (kind == "table") return read_table(rest);
    if (kind == "piecewise") {
        std::vector<PowerSegment> segs;
        for (const auto& seg : split(rest, ';')) {
            const auto c = seg.find(':');
            if (c == std::string::npos) raise(ErrorCode::Usage, "piecewise segment needs start:q=..: " + seg);
            const double start = to_number(seg.substr(0, c), text);
            const auto [q, lambda] = parse_power_args(seg.substr(c + 1), text);
            segs.push_back({start, q, lambda});
        }
        return MonotoneFunction::piecewise(std::move(segs));
    }
    raise(ErrorCode::Usage, "unknown function kind '" + kind + "'");
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for infinity-Laplacian absorption problems", "ilab"};
    app.require_subcommand(1);

    // classify
    Common cc;
    std::string selector = "Finv4";
    double scale = 1.0, delta = 1.0;
    auto* classify = app.add_subcommand("classify", "decide convergence of the singular integral at 0");
    add_common(classify, cc, true);
    classify->add_option("--selector", selector, "Finv4, Finv2, Finv:<p> or GammaInv")->capture_default_str();
    classify->add_option("--scale", scale, "integrand uses scale * F")->capture_default_str();
    classify->add_option("--delta", delta, "upper limit of integration")->capture_default_str();

    // barrier
    Common bc;
    BarrierConfig bcfg;
    std::optional<double> M2, step;
    auto* barrier = app.add_subcommand("barrier", "build and verify the positivity barrier");
    add_common(barrier, bc, false);
    barrier->add_option("--K", bcfg.K)->capture_default_str();
    barrier->add_option("--R", bcfg.R)->capture_default_str();
    barrier->add_option("--epsilon", bcfg.epsilon)->capture_default_str();
    barrier->add_option("--alpha", bcfg.alpha_init)->capture_default_str();
    barrier->add_option("--M1", bcfg.M1)->capture_default_str();
    barrier->add_option("--M2", M2);
    barrier->add_option("--step", step, "window width");
    barrier->add_option("--resolution", bcfg.grid_resolution)->capture_default_str();
    barrier->add_option("--tolerance", bcfg.residual_tolerance)->capture_default_str();

    // deadcore
    Common dc;
    double horizon = 1.0, inner_R = 1.0;
    DeadcoreConfig dcfg;
    auto* deadcore = app.add_subcommand("deadcore", "dead-core profile and radial supersolution");
    add_common(deadcore, dc, true);
    deadcore->add_option("--horizon", horizon)->capture_default_str();
    deadcore->add_option("--R", inner_R, "inner radius of the annulus")->capture_default_str();
    deadcore->add_option("--nodes", dcfg.nodes)->capture_default_str();

    // csp
    Common sc;
    CspConfig scfg;
    std::optional<double> sdelta;
    auto* csp = app.add_subcommand("csp", "compactly supported radial solution");
    add_common(csp, sc, false);
    csp->add_option("--K", scfg.K)->capture_default_str();
    csp->add_option("--kappa", scfg.kappa)->capture_default_str();
    csp->add_option("--delta", sdelta);
    csp->add_option("--psi-nodes", scfg.psi_nodes)->capture_default_str();
    csp->add_option("--tolerance", scfg.residual_tolerance)->capture_default_str();

    // solve
    Common vc;
    IntervalGeometry vgeom;
    double left = 0.0, right = 1.0;
    std::optional<double> vK;
    auto* solve = app.add_subcommand("solve", "finite-difference Dirichlet problem on an interval");
    add_common(solve, vc, true);
    solve->add_option("--K", vK, "use K|u'|^m instead of --g");
    solve->add_option("--a", vgeom.a)->capture_default_str();
    solve->add_option("--b", vgeom.b)->capture_default_str();
    solve->add_option("--n", vgeom.n, "cells")->capture_default_str();
    solve->add_option("--left", left)->capture_default_str();
    solve->add_option("--right", right)->capture_default_str();

    // compare
    Common mc;
    mc.f = "power:q=1,lambda=100";
    std::size_t mn = 1024;
    double m_rcirc = 0.8, m_eps = 1e-3, m_left = 1.0;
    std::optional<std::size_t> lower_node;
    auto* compare = app.add_subcommand("compare", "discrete comparison of a lifted dead-core supersolution");
    add_common(compare, mc, false);
    compare->add_option("--n", mn)->capture_default_str();
    compare->add_option("--rcirc", m_rcirc, "support width of the supersolution")->capture_default_str();
    compare->add_option("--epsilon", m_eps, "lift")->capture_default_str();
    compare->add_option("--left", m_left, "u(1); u(2) = 0")->capture_default_str();
    compare->add_option("--lower-node", lower_node, "push v below u at this node");

    // experiment
    Common ec;
    std::vector<double> qs{1.0, 3.0}, lambdas{100.0, 1.0};
    std::size_t en = 1024;
    auto* experiment = app.add_subcommand("experiment", "dead core versus strong maximum principle sweep");
    experiment->add_option("--q", qs, "exponents (paired with --lambda)")->capture_default_str();
    experiment->add_option("--lambda", lambdas)->capture_default_str();
    experiment->add_option("--n", en)->capture_default_str();
    experiment->add_option("--operator", ec.op)->check(CLI::IsMember({"L1", "L0"}))->capture_default_str();
    experiment->add_option("--out", ec.out);

    // counterexample
    double calpha = 0.5, rmax = 10.0;
    std::size_t cnodes = 10000;
    std::string cout_path;
    auto* counter = app.add_subcommand("counterexample", "positivity of 2 e^{3r} - e^{3 alpha r}");
    counter->add_option("--alpha", calpha)->capture_default_str();
    counter->add_option("--rmax", rmax)->capture_default_str();
    counter->add_option("--nodes", cnodes)->capture_default_str();
    counter->add_option("--out", cout_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    std::string out_path;
    for (auto* s : app.get_subcommands()) {
        if (s == classify) out_path = cc.out;
        else if (s == barrier) out_path = bc.out;
        else if (s == deadcore) out_path = dc.out;
        else if (s == csp) out_path = sc.out;
        else if (s == solve) out_path = vc.out;
        else if (s == compare) out_path = mc.out;
        else if (s == experiment) out_path = ec.out;
        else out_path = cout_path;
    }
    const Output o{out, out_path};
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        Json j = envelope(name);
        int code = kExitPass;

        if (*classify) {
            const auto f = parse_function_spec(cc.f);
            const Operator op = parse_operator(cc.op);
            IntegrandSelector sel;
            if (selector == "Finv4") sel = IntegrandSelector::inverse_root(4.0, scale);
            else if (selector == "Finv2") sel = IntegrandSelector::inverse_root(2.0, scale);
            else if (selector.rfind("Finv:", 0) == 0) sel = IntegrandSelector::inverse_root(to_number(selector.substr(5), selector), scale);
            else if (selector == "GammaInv") sel = IntegrandSelector::gamma_inverse(make_gradient(cc.g, op), scale);
            else raise(ErrorCode::Usage, "unknown selector '" + selector + "'");
            const ClassifierConfig ccfg;
            j["f"] = f.describe();
            j["delta"] = delta;
            j["tolerance"] = {{"margin", ccfg.margin}, {"quadrature", ccfg.quadrature_tolerance},
                              {"critical", ccfg.critical_tolerance}};
            const auto cls = classify_integral(f, sel, delta, ccfg);
            j["classification"] = to_json(cls);
            j["verdict"] = to_string(cls.verdict);
        } else if (*barrier) {
            const auto f = parse_function_spec(bc.f);
            bcfg.op = parse_operator(bc.op);
            bcfg.M2 = M2;
            bcfg.step_cap = step;
            const BarrierResult r = build_barrier(bcfg, f);
            j["f"] = f.describe();
            j["operator"] = bc.op;
            j["tolerance"] = bcfg.residual_tolerance;
            j["barrier"] = to_json(r);
            if (o.has_file()) write_profile_csv(o.sibling("phi"), r.profile);
            if (!r.residual.pass) code = kExitVerificationFailure;
        } else if (*deadcore) {
            const auto f = parse_function_spec(dc.f);
            const Operator op = parse_operator(dc.op);
            const auto g = make_gradient(dc.g, op);
            const Profile phi = build_deadcore_profile(f, g, horizon, dcfg);
            const double identity = deadcore_identity_residual(phi, f, g);
            const RCircReport rc = determine_r_circ(phi, f, g);
            ResidualOptions ro;
            ro.hi = rc.r_circ;
            const ResidualReport ineq = residual_report(ResidualTarget::DeadcoreInequality, phi, f, GradientInput{g}, op, ro);
            const RadialSupersolution v = assemble_radial_supersolution(phi, inner_R, rc.r_circ, f);
            const ResidualReport annulus = residual_report(ResidualTarget::AnnulusSupersolution, v.profile, f, GradientInput{g}, op);
            j["f"] = f.describe();
            j["g"] = g.term.describe();
            j["operator"] = dc.op;
            j["horizon"] = horizon;
            j["tolerance"] = {{"identity", dcfg.identity_tolerance}, {"inequality", ro.tolerance},
                              {"gluing", kGluingTolerance}};
            j["profile"] = to_json(phi);
            j["identity"] = {{"target", "gamma_identity"}, {"max_relative_defect", identity},
                             {"tolerance", dcfg.identity_tolerance}, {"pass", identity <= dcfg.identity_tolerance}};
            j["r_circ"] = to_json(rc);
            j["inequality"] = to_json(ineq);
            j["supersolution"] = {{"profile", to_json(v.profile)}, {"residual", to_json(annulus)},
                                  {"viscosity_clause", to_json(v.viscosity_clause)}, {"R", inner_R}};
            if (o.has_file()) {
                write_profile_csv(o.sibling("phi"), phi);
                write_profile_csv(o.sibling("v"), v.profile);
            }
            if (identity > dcfg.identity_tolerance || !ineq.pass || !annulus.pass || !v.viscosity_clause.holds) {
                code = kExitVerificationFailure;
            }
        } else if (*csp) {
            const auto f = parse_function_spec(sc.f);
            scfg.op = parse_operator(sc.op);
            scfg.delta = sdelta;
            const CspResult r = run_csp_pipeline(f, scfg);
            j["f"] = f.describe();
            j["operator"] = sc.op;
            j["K"] = scfg.K;
            j["kappa"] = scfg.kappa;
            j["tolerance"] = scfg.residual_tolerance;
            j["csp"] = to_json(r);
            j["support_radius"] = r.support_radius;
            if (o.has_file()) {
                write_profile_csv(o.sibling("phi"), r.phi);
                write_profile_csv(o.sibling("psi"), r.psi.psi);
                if (r.assembled) write_profile_csv(o.sibling("v"), r.assembled->profile);
            }
            if (!r.pass) code = kExitVerificationFailure;
        } else if (*solve) {
            const auto f = parse_function_spec(vc.f);
            const Operator op = parse_operator(vc.op);
            const GradientInput g = vK ? GradientInput{*vK} : GradientInput{make_gradient(vc.g, op)};
            const SolveResult r = solve_radial_dirichlet(f, g, op, vgeom, left, right);
            const DeadCore core = detect_dead_core(r.u, r.u.h * r.u.h);
            j["f"] = f.describe();
            j["operator"] = vc.op;
            j["grid"] = to_json(r.u);
            j["solve"] = to_json(r.report);
            j["tolerance"] = r.report.tolerance;
            j["residual_check"] = {{"target", "discrete_equation"}, {"max_abs_residual", r.report.residual_norm}};
            j["dead_core"] = to_json(core);
            if (o.has_file()) write_grid_csv(o.sibling("u"), r.u);
        } else if (*compare) {
            const auto f = parse_function_spec(mc.f);
            const Operator op = parse_operator(mc.op);
            LiftedComparisonSetup setup{mn, m_rcirc, m_eps, m_left, std::nullopt};
            if (lower_node) setup.lowered_node = *lower_node;
            const auto cmp = lifted_deadcore_comparison(f, op, setup);
            const auto& rep = cmp.report;
            const auto& u = cmp.u;
            const auto& v = cmp.v;
            const double hval = cmp.h;
            j["f"] = f.describe();
            j["operator"] = mc.op;
            j["epsilon"] = m_eps;
            j["r_circ"] = m_rcirc;
            j["tolerance"] = {{"h", hval}, {"h_tilde", "-f(v_eps)/2"}};
            j["target"] = "discrete_comparison";
            j["comparison"] = to_json(rep);
            j["solve"] = to_json(u.report);
            if (o.has_file()) {
                write_grid_csv(o.sibling("u"), u.u);
                write_grid_csv(o.sibling("v"), v);
            }
            if (!rep.hypotheses_hold || !rep.conclusion_holds) code = kExitVerificationFailure;
        } else if (*experiment) {
            if (qs.size() != lambdas.size()) raise(ErrorCode::Usage, "--q and --lambda need the same length");
            std::vector<ExperimentSpec> specs;
            for (std::size_t i = 0; i < qs.size(); ++i) specs.push_back({qs[i], lambdas[i], parse_operator(ec.op), en});
            const auto reports = run_experiment_sweep(specs);
            Json arr = Json::array();
            for (std::size_t i = 0; i < reports.size(); ++i) {
                arr.push_back(to_json(reports[i]));
                if (o.has_file()) write_grid_csv(o.sibling("u" + std::to_string(i)), reports[i].u);
            }
            j["experiments"] = arr;
            j["tolerance"] = {{"dead_core_threshold", "h^2"}, {"solver_update_factor", SolverConfig{}.tolerance_factor}};
            j["target"] = "dead_core_dichotomy";
        } else if (*counter) {
            const auto scan = counterexample_scan(calpha, rmax, cnodes);
            j["scan"] = to_json(scan);
            j["value_at_1"] = counterexample_eval(calpha, 1.0);
            j["min_value"] = scan.min_value;
            j["target"] = "counterexample_positivity";
            j["tolerance"] = 0.0;
            if (!(scan.min_value > 0.0)) code = kExitVerificationFailure;
        }
        j["pass"] = code == kExitPass;
        o.emit(j);
        return code;
    } catch (const Error& e) {
        err << "ilab " << name << ": " << e.what() << "\n";
        Json j = envelope(name);
        j["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        try {
            o.emit(j);
        } catch (const Error&) {
        }
        return exit_for(e.code());
    }
}

}  // namespace ilab
