// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/error.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ilab {

/// f(s) = scale * s^exponent
struct PowerLaw {
    double exponent = 1.0;
    double scale = 1.0;
};

/// Monotone samples (s_i, f_i), interpolated linearly. s_0 = 0, f_0 = 0.
struct Table {
    std::vector<double> s;
    std::vector<double> f;
};

/// One piece of a piecewise power law, anchored at its start point:
/// f(x) = f(start) + scale * (x - start)^exponent on [start, next start).
/// Anchoring keeps the whole function continuous and nondecreasing.
struct PowerSegment {
    double start = 0.0;
    double exponent = 1.0;
    double scale = 1.0;
};

struct Piecewise {
    std::vector<PowerSegment> segments;
};

/// Continuous, nondecreasing g : [0, cap] -> [0, inf) with g(0) = 0, together
/// with its primitive. Used both for the absorption term f and the gradient
/// term G.
class MonotoneFunction {
public:
    using Kind = std::variant<PowerLaw, Table, Piecewise>;
    static constexpr double kDefaultCap = 1.0e6;

    static MonotoneFunction power_law(double exponent, double scale = 1.0, double cap = kDefaultCap);
    static MonotoneFunction zero(double cap = kDefaultCap);
    static MonotoneFunction table(std::vector<double> s, std::vector<double> f);
    static MonotoneFunction piecewise(std::vector<PowerSegment> segments, double cap = kDefaultCap);

    /// g(s). Throws Domain outside [0, cap].
    double value(double s) const;
    double operator()(double s) const { return value(s); }
    /// int_0^t g(s) ds, exact for every kind.
    double primitive(double t) const;
    /// Right derivative g'(s+); may be +inf (power laws with exponent < 1 at 0).
    double slope(double s) const;

    double domain_cap() const { return cap_; }
    bool identically_zero() const;
    const Kind& kind() const { return kind_; }
    const PowerLaw* as_power_law() const { return std::get_if<PowerLaw>(&kind_); }
    std::string describe() const;

private:
    MonotoneFunction(Kind kind, double cap);
    void check_domain(double s, const char* what) const;
    std::size_t segment_index(double s) const;

    Kind kind_;
    double cap_ = kDefaultCap;
    // piecewise / table caches: value and primitive at each segment start
    std::vector<double> base_value_;
    std::vector<double> base_primitive_;
};

using NonlinearitySpec = MonotoneFunction;

/// The gradient term G together with the operator it is paired with; the
/// operator fixes the leading power in Gamma.
struct GradientTermSpec {
    MonotoneFunction term = MonotoneFunction::zero();
    Operator op = Operator::L1;

    static GradientTermSpec none(Operator op) { return {MonotoneFunction::zero(), op}; }
};

/// F(t) = int_0^t f.
double eval_F(const NonlinearitySpec& f, double t);

/// Gamma(t) = int_0^{2t} G + t^4/4 (L1) or + t^2/2 (L0).
double eval_Gamma(const GradientTermSpec& g, double t);

/// Gamma'(t) = 2 G(2t) + t^3 (L1) or + t (L0).
double eval_Gamma_derivative(const GradientTermSpec& g, double t);

/// Inverse of Gamma on [0, inf). Closed form when G = 0, bracketed TOMS 748 otherwise.
double invert_Gamma(const GradientTermSpec& g, double y);

// ---------------------------------------------------------------------------
// Singular integral classification

enum class Verdict { Diverges, Converges, Inconclusive };
const char* to_string(Verdict v);

/// Which integrand 1 / gauge(scale * F(s)) to classify near s = 0.
struct IntegrandSelector {
    enum class Gauge { InverseRoot, GammaInverse };

    Gauge gauge = Gauge::InverseRoot;
    double root = 4.0;  // InverseRoot: (scale F)^(-1/root)
    std::optional<GradientTermSpec> gradient;  // GammaInverse only
    double scale = 1.0;

    static IntegrandSelector inverse_root(double p, double scale = 1.0);
    static IntegrandSelector gamma_inverse(GradientTermSpec g, double scale = 1.0);

    /// Integrand value at s > 0; +inf where scale * F(s) = 0.
    double operator()(const NonlinearitySpec& f, double s) const;
    std::string name() const;
};

struct ClassifierConfig {
    int ladder_octaves = 40;  // floor = 2^-40 delta
    int fit_rungs = 12;
    double margin = 0.02;  // |exponent - 1| <= margin is undecided by slope alone
    /// Inside the margin a clean power fit with exponent >= 1 - critical_tolerance
    /// is the logarithmically divergent critical case.
    double critical_tolerance = 1e-6;
    double fit_tolerance = 1e-6;
    double quadrature_tolerance = 1e-10;  // relative, per octave
};

struct ClassificationResult {
    Verdict verdict = Verdict::Inconclusive;
    double exponent = 0.0;  // integrand ~ s^-exponent as s -> 0+
    double integral = 0.0;  // +inf marks divergence
    std::pair<double, double> band{0.0, 0.0};
    double fit_residual = 0.0;
    bool zero_on_interval = false;  // f = 0 on [0, s0]: integrand is +inf there
    bool critical = false;          // decided through the critical-exponent rule
    std::string selector;
};

ClassificationResult classify_integral(const NonlinearitySpec& f, const IntegrandSelector& selector,
                                       double delta = 1.0, const ClassifierConfig& config = {});

}  // namespace ilab
