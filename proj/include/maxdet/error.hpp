#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxdet {

enum class ErrorCode {
  InvalidInput,
  NoConvergence,
  NotPositiveDefinite,
  NotPSD,
  DimensionMismatch,
  OutOfDomain,
  InvalidGap,
  DegeneratePoints,
  MaxItersExceeded,
  ZeroMatrix,
  InvalidShape,
  ParseError,
};

// Stable identifier used in structured error output ("NotPositiveDefinite", ...).
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maxdet
