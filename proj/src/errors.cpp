#include "qdil/errors.hpp"

namespace qdil {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::RelationViolated: return "RelationViolated";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::GramMismatch: return "GramMismatch";
    case ErrorCode::NotDominated: return "NotDominated";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::NotSzego: return "NotSzego";
    case ErrorCode::SubsetPositivityFailure: return "SubsetPositivityFailure";
    case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorCode::IsometryDefect: return "IsometryDefect";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qdil
