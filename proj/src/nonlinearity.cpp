// SPDX-License-Identifier: MIT
#include "ilab/nonlinearity.hpp"

#include "ilab/numerics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace ilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

}  // namespace

MonotoneFunction::MonotoneFunction(Kind kind, double cap) : kind_(std::move(kind)), cap_(cap) {}

MonotoneFunction MonotoneFunction::power_law(double exponent, double scale, double cap) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        raise(ErrorCode::InvariantViolation, "power law scale must be >= 0");
    }
    if (!(exponent > 0.0) && scale > 0.0) {
        raise(ErrorCode::InvariantViolation, "power law exponent must be > 0 so that f(0) = 0");
    }
    if (!(cap > 0.0)) raise(ErrorCode::InvariantViolation, "domain cap must be positive");
    return MonotoneFunction(PowerLaw{exponent, scale}, cap);
}

MonotoneFunction MonotoneFunction::zero(double cap) { return power_law(1.0, 0.0, cap); }

MonotoneFunction MonotoneFunction::table(std::vector<double> s, std::vector<double> f) {
    if (s.size() < 2 || s.size() != f.size()) {
        raise(ErrorCode::InvariantViolation, "table needs >= 2 matching (s, f) samples");
    }
    if (s.front() != 0.0 || f.front() != 0.0) {
        raise(ErrorCode::InvariantViolation, "table must start at (0, 0)");
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i] > s[i - 1])) {
            raise(ErrorCode::InvariantViolation,
                  "table abscissae must be strictly increasing (row " + std::to_string(i) + ")");
        }
        if (!(f[i] >= f[i - 1])) {
            raise(ErrorCode::InvariantViolation,
                  "table values must be nondecreasing (row " + std::to_string(i) + ")");
        }
    }
    const double cap = s.back();
    MonotoneFunction out(Table{std::move(s), std::move(f)}, cap);
    const auto& t = std::get<Table>(out.kind_);
    out.base_primitive_.assign(t.s.size(), 0.0);
    for (std::size_t i = 1; i < t.s.size(); ++i) {
        out.base_primitive_[i] =
            out.base_primitive_[i - 1] + 0.5 * (t.s[i] - t.s[i - 1]) * (t.f[i] + t.f[i - 1]);
    }
    return out;
}

MonotoneFunction MonotoneFunction::piecewise(std::vector<PowerSegment> segments, double cap) {
    if (segments.empty()) raise(ErrorCode::InvariantViolation, "piecewise needs >= 1 segment");
    if (segments.front().start != 0.0) {
        raise(ErrorCode::InvariantViolation, "first piecewise segment must start at 0");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        if (i > 0 && !(seg.start > segments[i - 1].start)) {
            raise(ErrorCode::InvariantViolation, "piecewise segment starts must increase");
        }
        if (!(seg.scale >= 0.0) || !(seg.exponent > 0.0)) {
            raise(ErrorCode::InvariantViolation, "piecewise segment needs exponent > 0, scale >= 0");
        }
    }
    if (!(cap > segments.back().start)) {
        raise(ErrorCode::InvariantViolation, "domain cap must exceed the last segment start");
    }
    MonotoneFunction out(Piecewise{std::move(segments)}, cap);
    const auto& segs = std::get<Piecewise>(out.kind_).segments;
    out.base_value_.assign(segs.size(), 0.0);
    out.base_primitive_.assign(segs.size(), 0.0);
    for (std::size_t i = 1; i < segs.size(); ++i) {
        const auto& prev = segs[i - 1];
        const double len = segs[i].start - prev.start;
        out.base_value_[i] = out.base_value_[i - 1] + prev.scale * std::pow(len, prev.exponent);
        out.base_primitive_[i] = out.base_primitive_[i - 1] + out.base_value_[i - 1] * len +
                                 prev.scale * std::pow(len, prev.exponent + 1.0) / (prev.exponent + 1.0);
    }
    return out;
}

void MonotoneFunction::check_domain(double s, const char* what) const {
    if (!(s >= 0.0) || s > cap_) {
        raise(ErrorCode::Domain, std::string(what) + " evaluated at " + fmt(s) + " outside [0, " +
                                     fmt(cap_) + "]");
    }
}

std::size_t MonotoneFunction::segment_index(double s) const {
    if (const auto* t = std::get_if<Table>(&kind_)) {
        const auto it = std::upper_bound(t->s.begin(), t->s.end(), s);
        const auto idx = static_cast<std::size_t>(it - t->s.begin());
        return std::min(idx == 0 ? 0 : idx - 1, t->s.size() - 2);
    }
    const auto& segs = std::get<Piecewise>(kind_).segments;
    const auto it = std::upper_bound(segs.begin(), segs.end(), s,
                                     [](double x, const PowerSegment& seg) { return x < seg.start; });
    const auto idx = static_cast<std::size_t>(it - segs.begin());
    return idx == 0 ? 0 : idx - 1;
}

double MonotoneFunction::value(double s) const {
    check_domain(s, "function");
    if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
        if (p->scale == 0.0 || s == 0.0) return 0.0;
        return p->scale * std::pow(s, p->exponent);
    }
    const std::size_t i = segment_index(s);
    if (const auto* t = std::get_if<Table>(&kind_)) {
        const double w = (s - t->s[i]) / (t->s[i + 1] - t->s[i]);
        return t->f[i] + w * (t->f[i + 1] - t->f[i]);
    }
    const auto& seg = std::get<Piecewise>(kind_).segments[i];
    return base_value_[i] + seg.scale * std::pow(s - seg.start, seg.exponent);
}

double MonotoneFunction::primitive(double t) const {
    check_domain(t, "primitive");
    if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
        if (p->scale == 0.0 || t == 0.0) return 0.0;
        return p->scale * std::pow(t, p->exponent + 1.0) / (p->exponent + 1.0);
    }
    const std::size_t i = segment_index(t);
    if (const auto* tab = std::get_if<Table>(&kind_)) {
        const double ft = value(t);
        return base_primitive_[i] + 0.5 * (t - tab->s[i]) * (tab->f[i] + ft);
    }
    const auto& seg = std::get<Piecewise>(kind_).segments[i];
    const double len = t - seg.start;
    return base_primitive_[i] + base_value_[i] * len +
           seg.scale * std::pow(len, seg.exponent + 1.0) / (seg.exponent + 1.0);
}

double MonotoneFunction::slope(double s) const {
    check_domain(s, "slope");
    if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
        if (p->scale == 0.0) return 0.0;
        if (s == 0.0) {
            if (p->exponent < 1.0) return kInf;
            return p->exponent == 1.0 ? p->scale : 0.0;
        }
        return p->scale * p->exponent * std::pow(s, p->exponent - 1.0);
    }
    const std::size_t i = segment_index(s);
    if (const auto* t = std::get_if<Table>(&kind_)) {
        return (t->f[i + 1] - t->f[i]) / (t->s[i + 1] - t->s[i]);
    }
    const auto& seg = std::get<Piecewise>(kind_).segments[i];
    if (seg.scale == 0.0) return 0.0;
    const double len = s - seg.start;
    if (len == 0.0) {
        if (seg.exponent < 1.0) return kInf;
        return seg.exponent == 1.0 ? seg.scale : 0.0;
    }
    return seg.scale * seg.exponent * std::pow(len, seg.exponent - 1.0);
}

bool MonotoneFunction::identically_zero() const {
    if (const auto* p = std::get_if<PowerLaw>(&kind_)) return p->scale == 0.0;
    if (const auto* t = std::get_if<Table>(&kind_)) {
        return std::all_of(t->f.begin(), t->f.end(), [](double v) { return v == 0.0; });
    }
    const auto& segs = std::get<Piecewise>(kind_).segments;
    return std::all_of(segs.begin(), segs.end(), [](const PowerSegment& s) { return s.scale == 0.0; });
}

std::string MonotoneFunction::describe() const {
    if (const auto* p = std::get_if<PowerLaw>(&kind_)) {
        if (p->scale == 0.0) return "zero";
        return "power:q=" + fmt(p->exponent) + ",lambda=" + fmt(p->scale);
    }
    if (const auto* t = std::get_if<Table>(&kind_)) {
        return "table:" + std::to_string(t->s.size()) + " samples on [0," + fmt(t->s.back()) + "]";
    }
    std::string out = "piecewise:";
    const auto& segs = std::get<Piecewise>(kind_).segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (i) out += ";";
        out += fmt(segs[i].start) + ":q=" + fmt(segs[i].exponent) + ",lambda=" + fmt(segs[i].scale);
    }
    return out;
}

// ---------------------------------------------------------------------------

double eval_F(const NonlinearitySpec& f, double t) { return f.primitive(t); }

double eval_Gamma(const GradientTermSpec& g, double t) {
    if (!(t >= 0.0)) raise(ErrorCode::Domain, "Gamma evaluated at negative t = " + fmt(t));
    const double lead = g.op == Operator::L1 ? 0.25 * t * t * t * t : 0.5 * t * t;
    if (g.term.identically_zero()) return lead;
    return g.term.primitive(2.0 * t) + lead;
}

double eval_Gamma_derivative(const GradientTermSpec& g, double t) {
    if (!(t >= 0.0)) raise(ErrorCode::Domain, "Gamma' evaluated at negative t = " + fmt(t));
    const double lead = g.op == Operator::L1 ? t * t * t : t;
    if (g.term.identically_zero()) return lead;
    return 2.0 * g.term.value(2.0 * t) + lead;
}

double invert_Gamma(const GradientTermSpec& g, double y) {
    if (!(y >= 0.0)) raise(ErrorCode::Domain, "Gamma inverse requires y >= 0, got " + fmt(y));
    if (y == 0.0) return 0.0;
    // Gamma(t) >= leading power, so the G = 0 inverse is an upper bracket.
    const double closed = g.op == Operator::L1 ? std::sqrt(std::sqrt(4.0 * y)) : std::sqrt(2.0 * y);
    if (g.term.identically_zero()) return closed;
    double hi = std::min(closed, 0.5 * g.term.domain_cap());
    const double g_hi = eval_Gamma(g, hi);
    if (g_hi < y) raise(ErrorCode::Domain, "Gamma inverse of " + fmt(y) + " exceeds G's domain");
    if (g_hi == y) return hi;
    auto residual = [&](double t) { return eval_Gamma(g, t) - y; };
    std::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        residual, 0.0, hi, -y, g_hi - y, boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (bracket.first + bracket.second);
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Diverges: return "Diverges";
        case Verdict::Converges: return "Converges";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

IntegrandSelector IntegrandSelector::inverse_root(double p, double scale) {
    if (!(p > 0.0)) raise(ErrorCode::Usage, "inverse-root selector needs p > 0");
    if (!(scale > 0.0)) raise(ErrorCode::Usage, "selector scale must be positive");
    IntegrandSelector s;
    s.gauge = Gauge::InverseRoot;
    s.root = p;
    s.scale = scale;
    return s;
}

IntegrandSelector IntegrandSelector::gamma_inverse(GradientTermSpec g, double scale) {
    if (!(scale > 0.0)) raise(ErrorCode::Usage, "selector scale must be positive");
    IntegrandSelector s;
    s.gauge = Gauge::GammaInverse;
    s.gradient = std::move(g);
    s.scale = scale;
    return s;
}

double IntegrandSelector::operator()(const NonlinearitySpec& f, double s) const {
    const double arg = scale * f.primitive(s);
    if (arg <= 0.0) return kInf;
    if (gauge == Gauge::InverseRoot) return std::pow(arg, -1.0 / root);
    const double inv = invert_Gamma(*gradient, arg);
    return inv > 0.0 ? 1.0 / inv : kInf;
}

std::string IntegrandSelector::name() const {
    const std::string arg = scale == 1.0 ? "F" : fmt(scale) + "F";
    if (gauge == Gauge::InverseRoot) return "(" + arg + ")^(-1/" + fmt(root) + ")";
    return "1/GammaInv_" + std::string(to_string(gradient->op)) + "(" + arg + ")";
}

ClassificationResult classify_integral(const NonlinearitySpec& f, const IntegrandSelector& selector,
                                       double delta, const ClassifierConfig& config) {
    if (!(delta > 0.0)) raise(ErrorCode::Domain, "classification needs delta > 0");
    if (delta > f.domain_cap()) raise(ErrorCode::Domain, "delta exceeds the domain cap of f");
    if (config.fit_rungs < 3 || config.fit_rungs > config.ladder_octaves + 1) {
        raise(ErrorCode::Usage, "fit_rungs must lie in [3, ladder_octaves + 1]");
    }

    ClassificationResult out;
    out.selector = selector.name();
    const int K = config.ladder_octaves;
    std::vector<double> s(K + 1), val(K + 1);
    for (int k = 0; k <= K; ++k) {
        s[k] = std::ldexp(delta, -k);
        val[k] = selector(f, s[k]);
    }
    const double s_floor = s[K];

    if (!std::isfinite(val[K])) {
        // scale F vanishes at the floor, hence on all of [0, floor]: f = 0 there.
        out.verdict = Verdict::Diverges;
        out.zero_on_interval = true;
        out.exponent = kInf;
        out.integral = kInf;
        out.band = {kInf, kInf};
        return out;
    }

    // log-log regression over the last rungs
    const int first = K + 1 - config.fit_rungs;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = config.fit_rungs;
    for (int k = first; k <= K; ++k) {
        const double x = std::log(s[k]);
        const double y = std::log(val[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double fit_residual = 0.0;
    for (int k = first; k <= K; ++k) {
        const double pred = intercept + slope * std::log(s[k]);
        fit_residual = std::max(fit_residual, std::abs(std::log(val[k]) - pred));
    }
    out.exponent = -slope;
    out.fit_residual = fit_residual;

    // regular part: adaptive Simpson octave by octave on [floor, delta]
    auto integrand = [&](double x) { return selector(f, x); };
    double partial = 0.0;
    for (int k = 0; k < K; ++k) {
        const double scale = std::max(val[k], val[k + 1]) * (s[k] - s[k + 1]);
        partial += numerics::adaptive_simpson(integrand, s[k + 1], s[k],
                                              config.quadrature_tolerance * scale);
    }
    auto tail = [&](double e) { return e < 1.0 ? val[K] * s_floor / (1.0 - e) : kInf; };

    const double e = out.exponent;
    if (e > 1.0 + config.margin) {
        out.verdict = Verdict::Diverges;
    } else if (e < 1.0 - config.margin) {
        out.verdict = Verdict::Converges;
    } else if (e >= 1.0 - config.critical_tolerance && fit_residual <= config.fit_tolerance) {
        // clean power behavior at (or beyond) the critical exponent: int s^-1 = inf
        out.verdict = Verdict::Diverges;
        out.critical = true;
    } else {
        out.verdict = Verdict::Inconclusive;
    }

    switch (out.verdict) {
        case Verdict::Diverges:
            out.integral = kInf;
            out.band = {partial, kInf};
            break;
        case Verdict::Converges:
            out.integral = partial + tail(e);
            out.band = {partial, partial + tail(std::min(e + config.margin, 1.0))};
            break;
        case Verdict::Inconclusive:
            out.integral = partial;
            out.band = {partial, kInf};
            break;
    }
    return out;
}

}  // namespace ilab
