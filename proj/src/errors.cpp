#include "starweyl/errors.hpp"

namespace starweyl {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::AdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorCode::BoundaryArgument: return "BoundaryArgument";
    case ErrorCode::ZeroBase: return "ZeroBase";
    case ErrorCode::DegenerateOmega: return "DegenerateOmega";
    case ErrorCode::ResonantExponent: return "ResonantExponent";
    case ErrorCode::TruncationFailure: return "TruncationFailure";
    case ErrorCode::WronskianDeviation: return "WronskianDeviation";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::WronskianDrift: return "WronskianDrift";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::SigmaSingular: return "SigmaSingular";
    case ErrorCode::DenominatorSingular: return "DenominatorSingular";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::GuardViolation: return "GuardViolation";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

const char* reason_name(AdmissibilityReason reason) {
    switch (reason) {
    case AdmissibilityReason::RealPartCollision: return "RealPartCollision";
    case AdmissibilityReason::DifferenceMultipleOfN: return "DifferenceMultipleOfN";
    case AdmissibilityReason::ForbiddenIntegerExponent: return "ForbiddenIntegerExponent";
    }
    return "Unknown";
}

}  // namespace starweyl
