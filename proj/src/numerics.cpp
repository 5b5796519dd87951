// SPDX-License-Identifier: MIT
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ilab::numerics {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    if (n == 1) {
        x[0] = a;
        return x;
    }
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + h * static_cast<double>(i);
    x[n - 1] = b;
    return x;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return out;
}

bool is_uniform(std::span<const double> x, double rel_tol) {
    if (x.size() < 3) return true;
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::abs((x[i] - x[i - 1]) - h) > rel_tol * std::abs(h)) return false;
    }
    return true;
}

std::vector<double> derivative(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("derivative: need >= 3 matching samples");
    std::vector<double> d(n);
    const bool uniform = is_uniform(x);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (uniform && i >= 2 && i + 2 < n) {
            const double h = x[i + 1] - x[i];
            d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
        } else if (uniform && n >= 5) {
            // fourth order, shifted one node towards the interior
            const double h = x[i + 1] - x[i];
            d[i] = i == 1 ? (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
                          : (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] -
                             y[n - 5]) / (12.0 * h);
        } else {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            d[i] = (-h1 / (h0 * (h0 + h1))) * y[i - 1] + ((h1 - h0) / (h0 * h1)) * y[i] +
                   (h0 / (h1 * (h0 + h1))) * y[i + 1];
        }
    }
    {
        const double h0 = x[1] - x[0];
        const double h1 = x[2] - x[1];
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
               h0 / (h1 * (h0 + h1)) * y[2];
    }
    {
        const double h0 = x[n - 2] - x[n - 3];
        const double h1 = x[n - 1] - x[n - 2];
        d[n - 1] = h1 / (h0 * (h0 + h1)) * y[n - 3] - (h0 + h1) / (h0 * h1) * y[n - 2] +
                   (2.0 * h1 + h0) / (h1 * (h0 + h1)) * y[n - 1];
    }
    return d;
}

std::vector<double> second_derivative(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 4 || y.size() != n) {
        throw std::invalid_argument("second_derivative: need >= 4 matching samples");
    }
    std::vector<double> d(n);
    const bool uniform = is_uniform(x);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (uniform && i >= 2 && i + 2 < n) {
            const double h = x[i + 1] - x[i];
            d[i] = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2]) /
                   (12.0 * h * h);
        } else if (uniform && n >= 6) {
            const double h = x[i + 1] - x[i];
            d[i] = i == 1 ? (10.0 * y[0] - 15.0 * y[1] - 4.0 * y[2] + 14.0 * y[3] - 6.0 * y[4] + y[5]) /
                                (12.0 * h * h)
                          : (10.0 * y[n - 1] - 15.0 * y[n - 2] - 4.0 * y[n - 3] + 14.0 * y[n - 4] -
                             6.0 * y[n - 5] + y[n - 6]) / (12.0 * h * h);
        } else {
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            d[i] = 2.0 * (y[i - 1] / (h0 * (h0 + h1)) - y[i] / (h0 * h1) + y[i + 1] / (h1 * (h0 + h1)));
        }
    }
    // one-sided, second order on uniform spacing: (2y0 - 5y1 + 4y2 - y3)/h^2
    if (uniform) {
        const double h = x[1] - x[0];
        d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (h * h);
        d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / (h * h);
    } else {
        d[0] = 2.0 * d[1] - d[2];
        d[n - 1] = 2.0 * d[n - 2] - d[n - 3];
    }
    return d;
}

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    return rhs;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 samples");
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch-Butland), monotone by construction
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            const double w0 = 2.0 * h1 + h0;
            const double w1 = h1 + 2.0 * h0;
            m_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
        }
    }
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front() + m_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + m_.back() * (x - x_.back());
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return hermite(x_[i], x_[i + 1], y_[i], y_[i + 1], m_[i], m_[i + 1], x);
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 +
           (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1;
}

}  // namespace ilab::numerics
