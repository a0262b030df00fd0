#pragma once

#include <stdexcept>
#include <string>

namespace starweyl {

enum class ErrorCode {
    InvalidArgument,
    NonConvergence,
    AdmissibilityViolation,
    BoundaryArgument,
    ZeroBase,
    DegenerateOmega,
    ResonantExponent,
    TruncationFailure,
    WronskianDeviation,
    StepLimitExceeded,
    WronskianDrift,
    SingularSystem,
    SigmaSingular,
    DenominatorSingular,
    GridMismatch,
    SchemaError,
    GuardViolation,
    IoError,
};

const char* error_name(ErrorCode code);

// Base error for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class AdmissibilityReason {
    RealPartCollision,
    DifferenceMultipleOfN,
    ForbiddenIntegerExponent,
};

const char* reason_name(AdmissibilityReason reason);

class AdmissibilityError : public Error {
public:
    AdmissibilityError(AdmissibilityReason reason, const std::string& what)
        : Error(ErrorCode::AdmissibilityViolation, what), reason_(reason) {}

    AdmissibilityReason reason() const noexcept { return reason_; }

private:
    AdmissibilityReason reason_;
};

}  // namespace starweyl
