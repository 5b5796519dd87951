// SPDX-License-Identifier: MIT
#include "ilab/profile.hpp"

#include "ilab/error.hpp"
#include "ilab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ilab {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Barrier: return "barrier";
        case Provenance::Deadcore: return "deadcore";
        case Provenance::Csp: return "csp";
        case Provenance::Manual: return "manual";
    }
    return "manual";
}

Profile Profile::from_samples(std::vector<double> grid, std::vector<double> values,
                              Provenance provenance) {
    if (grid.size() < 4 || grid.size() != values.size()) {
        raise(ErrorCode::InvariantViolation, "profile needs >= 4 matching samples for derivatives");
    }
    Profile p;
    p.first_derivative = numerics::derivative(grid, values);
    p.second_derivative = numerics::second_derivative(grid, values);
    p.grid = std::move(grid);
    p.values = std::move(values);
    p.provenance = provenance;
    return p;
}

Profile Profile::from_function(std::vector<double> grid, const std::function<double(double)>& value,
                               const std::function<double(double)>& first,
                               const std::function<double(double)>& second, Provenance provenance) {
    Profile p;
    p.grid = std::move(grid);
    p.provenance = provenance;
    p.values.reserve(p.grid.size());
    p.first_derivative.reserve(p.grid.size());
    p.second_derivative.reserve(p.grid.size());
    for (double r : p.grid) {
        p.values.push_back(value(r));
        p.first_derivative.push_back(first(r));
        p.second_derivative.push_back(second(r));
    }
    return p;
}

std::size_t Profile::cell(double r) const {
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, grid.size() - 2);
}

std::size_t Profile::nearest(double r) const {
    const std::size_t i = cell(r);
    return std::abs(grid[i + 1] - r) < std::abs(r - grid[i]) ? i + 1 : i;
}

double Profile::value_at(double r) const {
    if (r < grid.front() || r > grid.back()) {
        raise(ErrorCode::Domain, "profile evaluated outside its grid");
    }
    const std::size_t i = cell(r);
    return numerics::hermite(grid[i], grid[i + 1], values[i], values[i + 1], first_derivative[i],
                             first_derivative[i + 1], r);
}

namespace {
double lerp_samples(const Profile& p, const std::vector<double>& y, double r) {
    if (r < p.grid.front() || r > p.grid.back()) {
        raise(ErrorCode::Domain, "profile evaluated outside its grid");
    }
    const std::size_t i = p.cell(r);
    const double w = (r - p.grid[i]) / (p.grid[i + 1] - p.grid[i]);
    return (1.0 - w) * y[i] + w * y[i + 1];
}
}  // namespace

double Profile::slope_at(double r) const { return lerp_samples(*this, first_derivative, r); }
double Profile::curvature_at(double r) const { return lerp_samples(*this, second_derivative, r); }

void Profile::validate() const {
    const std::size_t n = grid.size();
    if (n < 3 || values.size() != n || first_derivative.size() != n || second_derivative.size() != n) {
        raise(ErrorCode::InvariantViolation, "profile arrays must share a length >= 3");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            raise(ErrorCode::InvariantViolation, "profile grid must be strictly increasing");
        }
        if (!std::isfinite(values[i]) || !std::isfinite(first_derivative[i]) ||
            !std::isfinite(second_derivative[i])) {
            raise(ErrorCode::InvariantViolation, "profile holds non-finite samples");
        }
        // barrier profiles dip below zero to the right of their root
        if (provenance != Provenance::Barrier && values[i] < 0.0) {
            raise(ErrorCode::InvariantViolation, "profile values must be nonnegative");
        }
    }
    if (support_edge) {
        const double e = *support_edge;
        if (e < grid.front() || e > grid.back()) {
            raise(ErrorCode::InvariantViolation, "support edge outside the profile grid");
        }
        if (std::abs(value_at(e)) > kGluingTolerance || std::abs(slope_at(e)) > kGluingTolerance) {
            raise(ErrorCode::Gluing, "value or slope does not vanish at the support edge");
        }
    }
}

}  // namespace ilab
