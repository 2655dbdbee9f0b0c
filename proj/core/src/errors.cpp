#include "chaos_ns/errors.hpp"

namespace chaos_ns {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::MissingCoordinate: return "MissingCoordinate";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotDivergenceFree: return "NotDivergenceFree";
    case ErrorCode::ZeroWavevector: return "ZeroWavevector";
    case ErrorCode::CutoffOutOfRange: return "CutoffOutOfRange";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::IndexSetMismatch: return "IndexSetMismatch";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace chaos_ns
