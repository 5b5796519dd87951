// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>
#include <cmath>

namespace ilab::numerics {

std::vector<double> linspace(double a, double b, std::size_t n);

/// Adaptive Simpson quadrature with Richardson correction.
/// `tol` is an absolute tolerance on the whole interval.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 50);

/// Running trapezoid integral of samples y over nodes x, starting at x[0] with 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// Finite-difference first derivative: fourth-order central where a full
/// five-point stencil fits on a uniform grid, fourth-order shifted stencils
/// next to the ends, second-order one-sided at the ends. Non-uniform grids
/// fall back to the three-point formulas everywhere.
std::vector<double> derivative(std::span<const double> x, std::span<const double> y);

/// Second derivative with the same stencil policy as `derivative`.
std::vector<double> second_derivative(std::span<const double> x, std::span<const double> y);

bool is_uniform(std::span<const double> x, double rel_tol = 1e-9);

/// Solves a tridiagonal system in place (Thomas algorithm).
/// lower[0] and upper[n-1] are ignored. Returns the solution.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, m_;
};

/// Cubic Hermite evaluation on [x0, x1] given end values and slopes.
double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x);

/// Real root of order 3 or 1 (sign preserving). Order 1 is the identity.
inline double signed_root(double w, int order) {
    if (order == 1) return w;
    return std::cbrt(w);
}

}  // namespace ilab::numerics
