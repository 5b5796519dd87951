// SPDX-License-Identifier: MIT
#include "ilab/implicit_primitive.hpp"

#include "ilab/error.hpp"
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ilab {

ImplicitPrimitive::ImplicitPrimitive(std::function<double(double)> integrand, double x_min,
                                     int per_decade, double rel_tol)
    : k_(std::move(integrand)), ratio_(std::pow(10.0, 1.0 / per_decade)), rel_tol_(rel_tol) {
    if (!(x_min > 0.0) || per_decade < 1) {
        raise(ErrorCode::InvariantViolation, "implicit primitive needs x_min > 0 and per_decade >= 1");
    }
    const double k0 = k_(x_min);
    const double k1 = k_(10.0 * x_min);
    if (!std::isfinite(k0) || !std::isfinite(k1) || !(k0 > 0.0) || !(k1 > 0.0)) {
        raise(ErrorCode::DivergentIntegral, "integrand is infinite near zero: the integral diverges");
    }
    tail_exponent_ = -std::log10(k1 / k0);
    if (tail_exponent_ >= 1.0) {
        std::ostringstream os;
        os << "integrand behaves like s^-" << tail_exponent_ << " near zero: the integral diverges";
        raise(ErrorCode::DivergentIntegral, os.str());
    }
    tail_total_ = k0 * x_min / (1.0 - tail_exponent_);
    x_.push_back(x_min);
    cum_.push_back(tail_total_);
}

double ImplicitPrimitive::tail(double x) const {
    return tail_total_ * std::pow(x / x_.front(), 1.0 - tail_exponent_);
}

double ImplicitPrimitive::cell_integral(double a, double b) const {
    if (b <= a) return 0.0;
    const double scale = std::max(k_(a), k_(b)) * (b - a);
    return numerics::adaptive_simpson(k_, a, b, rel_tol_ * scale);
}

void ImplicitPrimitive::push_rung(double x) {
    const double a = x_.back();
    const double piece = cell_integral(a, x);
    if (!std::isfinite(piece)) {
        raise(ErrorCode::DivergentIntegral, "integrand is not integrable on the ladder");
    }
    x_.push_back(x);
    cum_.push_back(cum_.back() + piece);
}

void ImplicitPrimitive::extend_to(double x) {
    while (x_.back() < x) {
        const double next = x_.back() * ratio_;
        push_rung(next * (1.0 + 1e-12) >= x ? x : next);
    }
}

bool ImplicitPrimitive::extend_until(double target, double cap) {
    while (cum_.back() < target) {
        if (x_.back() >= cap) return false;
        push_rung(std::min(cap, x_.back() * ratio_));
    }
    return true;
}

double ImplicitPrimitive::operator()(double x) const {
    if (x < 0.0 || x > x_.back() * (1.0 + 1e-14)) {
        raise(ErrorCode::Domain, "implicit primitive evaluated outside its tabulated range");
    }
    if (x <= x_.front()) return x <= 0.0 ? 0.0 : tail(x);
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) return cum_.back();
    return cum_[i] + cell_integral(x_[i], x);
}

double ImplicitPrimitive::inverse(double t) const {
    if (t < 0.0 || t > cum_.back() * (1.0 + 1e-14)) {
        raise(ErrorCode::Domain, "implicit primitive inverted outside its tabulated range");
    }
    if (t <= 0.0) return 0.0;
    if (t <= tail_total_) return x_.front() * std::pow(t / tail_total_, 1.0 / (1.0 - tail_exponent_));
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    if (it == cum_.end()) return x_.back();
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
    double lo = x_[i];
    double hi = x_[i + 1];
    // safeguarded Newton on T(x) - t; T' = k
    double x = lo + (hi - lo) * (t - cum_[i]) / (cum_[i + 1] - cum_[i]);
    for (int it_n = 0; it_n < 60; ++it_n) {
        const double r = cum_[i] + cell_integral(x_[i], x) - t;
        if (r > 0.0) hi = x; else lo = x;
        double next = x - r / k_(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * x) return next;
        x = next;
    }
    return x;
}

}  // namespace ilab
