#include "layoutcut/error.hpp"

namespace layoutcut {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kAlreadyThresholded: return "AlreadyThresholded";
    case ErrorCode::kEmptyActiveSet: return "EmptyActiveSet";
    case ErrorCode::kSingularDegree: return "SingularDegree";
    case ErrorCode::kNoEigengap: return "NoEigengap";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDegenerateScale: return "DegenerateScale";
    case ErrorCode::kRoundOutOfRange: return "RoundOutOfRange";
    case ErrorCode::kAdapterFailure: return "AdapterFailure";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code) {}

}  // namespace layoutcut
