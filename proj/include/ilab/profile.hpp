// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ilab {

enum class Provenance { Barrier, Deadcore, Csp, Manual };
const char* to_string(Provenance p);

/// A one-dimensional radial function sampled on a strictly increasing grid,
/// with first and second derivative estimates at the same nodes.
struct Profile {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> first_derivative;
    std::vector<double> second_derivative;
    /// Point where the profile is glued to its zero extension, if any.
    std::optional<double> support_edge;
    Provenance provenance = Provenance::Manual;

    /// Derivatives from finite differences of the samples.
    static Profile from_samples(std::vector<double> grid, std::vector<double> values,
                                Provenance provenance = Provenance::Manual);

    /// Exact derivatives supplied by the caller.
    static Profile from_function(std::vector<double> grid, const std::function<double(double)>& value,
                                 const std::function<double(double)>& first,
                                 const std::function<double(double)>& second,
                                 Provenance provenance = Provenance::Manual);

    std::size_t size() const { return grid.size(); }
    double front() const { return grid.front(); }
    double back() const { return grid.back(); }

    /// Index i with grid[i] <= r < grid[i+1] (clamped to the last cell).
    std::size_t cell(double r) const;
    /// Nearest node index.
    std::size_t nearest(double r) const;

    /// Cubic Hermite interpolation from values and first derivatives.
    double value_at(double r) const;
    /// Linear interpolation of the derivative samples.
    double slope_at(double r) const;
    double curvature_at(double r) const;

    /// Shape invariants: equal lengths >= 3, strictly increasing grid, finite
    /// samples, and (unless the profile is a barrier) nonnegative values.
    /// Throws InvariantViolation.
    void validate() const;
};

/// Absolute tolerance used for C^1 gluing at support edges.
inline constexpr double kGluingTolerance = 1e-9;

}  // namespace ilab
