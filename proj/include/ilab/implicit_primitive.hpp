// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

namespace ilab {

/// T(x) = int_0^x k(s) ds for a positive integrand k that may blow up like a
/// power s^-e (e < 1) at 0. Tabulated on a geometric ladder, with the part
/// below the first rung taken from the fitted power law. Monotone, so it
/// inverts uniquely.
class ImplicitPrimitive {
public:
    /// Throws DivergentIntegral when the integrand is not integrable at 0.
    ImplicitPrimitive(std::function<double(double)> integrand, double x_min = 1e-12,
                      int per_decade = 64, double rel_tol = 1e-13);

    /// Tabulates up to x (no-op when already covered).
    void extend_to(double x);
    /// Tabulates until T reaches `target` or the ladder hits `cap`.
    /// Returns whether the target was reached.
    bool extend_until(double target, double cap);

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double total() const { return cum_.back(); }
    double tail_exponent() const { return tail_exponent_; }
    double integrand(double x) const { return k_(x); }

    /// T(x) for 0 <= x <= x_max().
    double operator()(double x) const;
    /// x with T(x) = t for 0 <= t <= total().
    double inverse(double t) const;

private:
    double cell_integral(double a, double b) const;
    double tail(double x) const;
    void push_rung(double x);

    std::function<double(double)> k_;
    double ratio_ = 1.0;
    double rel_tol_ = 1e-13;
    double tail_exponent_ = 0.0;
    double tail_total_ = 0.0;
    std::vector<double> x_;
    std::vector<double> cum_;
};

}  // namespace ilab
