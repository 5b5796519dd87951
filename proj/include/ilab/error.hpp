// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace ilab {

enum class ErrorCode {
    Domain,
    InvariantViolation,
    DivergentIntegral,
    NoBarrier,
    ConvergenceFailure,
    NoValidRadius,
    Gluing,
    Geometry,
    CriticalPoint,
    Usage,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
/// The code lets callers (the CLI in particular) map failures to exit codes
/// without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

/// Operator selector: the infinity Laplacian or its normalized version.
enum class Operator { L1, L0 };

const char* to_string(Operator op);
Operator parse_operator(const std::string& text);

}  // namespace ilab
