// SPDX-License-Identifier: MIT
#include "ilab/error.hpp"

namespace ilab {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Domain: return "DomainError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::DivergentIntegral: return "DivergentIntegral";
        case ErrorCode::NoBarrier: return "NoBarrier";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NoValidRadius: return "NoValidRadius";
        case ErrorCode::Gluing: return "GluingError";
        case ErrorCode::Geometry: return "GeometryError";
        case ErrorCode::CriticalPoint: return "CriticalPointError";
        case ErrorCode::Usage: return "UsageError";
    }
    return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

const char* to_string(Operator op) { return op == Operator::L1 ? "L1" : "L0"; }

Operator parse_operator(const std::string& text) {
    if (text == "L1" || text == "l1") return Operator::L1;
    if (text == "L0" || text == "l0") return Operator::L0;
    raise(ErrorCode::Usage, "unknown operator tag '" + text + "' (expected L1 or L0)");
}

}  // namespace ilab
