#pragma once

#include <stdexcept>
#include <string>

namespace ckn {

enum class ErrorCode {
    DimensionTooSmall,
    WeightOutOfRange,
    OffsetOutOfRange,
    PowerOutOfRange,
    NonPositiveMass,
    NegativeCoupling,
    InvalidConstant,
    RegimeMismatch,
    BadGridSpec,
    NonIntegrable,
    ShiftTooLarge,
    DegenerateProfile,
    ZeroProfile,
    CutoffOutsideWindow,
    QuadratureDivergence,
    BranchBoundary,
    PoorFit,
    OutsideStrip,
    DegenerateCoefficients,
    ScanWindowExhausted,
    BranchAbsent,
    NoPositiveInterval,
    NoConvergence,
    StructureViolation,
    LeftBall,
    BadInput,
};

// maps onto CLI exit codes 2 / 3 / 4
enum class ErrorKind { Validation, Numeric, NonConvergence };

const char* error_name(ErrorCode code);
ErrorKind error_kind(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg);
    ErrorCode code() const { return code_; }
    const char* name() const { return error_name(code_); }

private:
    ErrorCode code_;
};

} // namespace ckn
