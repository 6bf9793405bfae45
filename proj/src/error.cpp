#include "maxdet/error.hpp"

namespace maxdet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidGap: return "InvalidGap";
    case ErrorCode::DegeneratePoints: return "DegeneratePoints";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace maxdet
