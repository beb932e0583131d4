#ifndef LAYOUTCUT_ERROR_HPP_
#define LAYOUTCUT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace layoutcut {

enum class ErrorCode {
  kBadMagic,
  kDimMismatch,
  kNonFinite,
  kZeroVector,
  kNotNormalized,
  kAlreadyThresholded,
  kEmptyActiveSet,
  kSingularDegree,
  kNoEigengap,
  kNotConverged,
  kEmptyMask,
  kDegenerateScale,
  kRoundOutOfRange,
  kAdapterFailure,
  kSizeMismatch,
  kInvalidConfig,
  kInvalidLayout,
  kIo,
  kParse,
};

// Stable name used on the diagnostic stream, e.g. "BadMagic".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace layoutcut

#endif  // LAYOUTCUT_ERROR_HPP_
