// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/barrier.hpp"
#include "ilab/csp_profile.hpp"
#include "ilab/deadcore.hpp"
#include "ilab/grid_lab.hpp"
#include "ilab/nonlinearity.hpp"
#include "ilab/profile.hpp"
#include "ilab/radial_ops.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace ilab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Deterministic text: keys sorted, floats as %.12g, non-finite floats as
/// the strings "infinity" / "-infinity" / "nan".
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const Profile& p, bool include_samples = false);
Json to_json(const ResidualReport& r, bool include_samples = false);
Json to_json(const ClassificationResult& c);
Json to_json(const KinkReport& k);
Json to_json(const CounterexampleScan& s);
Json to_json(const BarrierResult& b);
Json to_json(const RCircReport& r);
Json to_json(const PsiReport& p);
Json to_json(const CompactSolution& c);
Json to_json(const CspResult& c);
Json to_json(const SolveReport& s);
Json to_json(const GridFunction& u, bool include_samples = false);
Json to_json(const ComparisonReport& c);
Json to_json(const DeadCore& d);
Json to_json(const ExperimentReport& e);

/// Columns t, phi, dphi, d2phi.
void write_profile_csv(const std::filesystem::path& path, const Profile& p);
/// Columns node, x, value (x is the first coordinate for boxes).
void write_grid_csv(const std::filesystem::path& path, const GridFunction& u);

}  // namespace ilab
