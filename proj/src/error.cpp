#include "ckn/error.h"

namespace ckn {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::PowerOutOfRange: return "PowerOutOfRange";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NegativeCoupling: return "NegativeCoupling";
    case ErrorCode::InvalidConstant: return "InvalidConstant";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::BadGridSpec: return "BadGridSpec";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::ShiftTooLarge: return "ShiftTooLarge";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::ZeroProfile: return "ZeroProfile";
    case ErrorCode::CutoffOutsideWindow: return "CutoffOutsideWindow";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::BranchBoundary: return "BranchBoundary";
    case ErrorCode::PoorFit: return "PoorFit";
    case ErrorCode::OutsideStrip: return "OutsideStrip";
    case ErrorCode::DegenerateCoefficients: return "DegenerateCoefficients";
    case ErrorCode::ScanWindowExhausted: return "ScanWindowExhausted";
    case ErrorCode::BranchAbsent: return "BranchAbsent";
    case ErrorCode::NoPositiveInterval: return "NoPositiveInterval";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::LeftBall: return "LeftBall";
    case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

ErrorKind error_kind(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionTooSmall:
    case ErrorCode::WeightOutOfRange:
    case ErrorCode::OffsetOutOfRange:
    case ErrorCode::PowerOutOfRange:
    case ErrorCode::NonPositiveMass:
    case ErrorCode::NegativeCoupling:
    case ErrorCode::InvalidConstant:
    case ErrorCode::RegimeMismatch:
    case ErrorCode::BadGridSpec:
    case ErrorCode::OutsideStrip:
    case ErrorCode::BadInput:
        return ErrorKind::Validation;
    case ErrorCode::NoConvergence:
        return ErrorKind::NonConvergence;
    default:
        return ErrorKind::Numeric;
    }
}

Error::Error(ErrorCode code, const std::string& msg)
    : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}

} // namespace ckn
