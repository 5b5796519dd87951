// SPDX-License-Identifier: MIT
#pragma once

#include "ilab/nonlinearity.hpp"

#include <iosfwd>
#include <string>

namespace ilab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailure = 2;

/// `power:q=<q>[,lambda=<l>]`, `table:<path.csv>` (columns s,f),
/// `piecewise:<start>:q=<q>,lambda=<l>;...` or `zero`.
MonotoneFunction parse_function_spec(const std::string& text);

/// Runs one subcommand. JSON goes to `out` unless --out names a file, in
/// which case CSV profiles are written next to it.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ilab
