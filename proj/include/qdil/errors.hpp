#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdil {

enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  IndexOutOfRange,
  RelationViolated,
  NotHermitian,
  NotPSD,
  GramMismatch,
  NotDominated,
  NoConvergence,
  NotPure,
  NotSzego,
  SubsetPositivityFailure,
  TruncationNotConverged,
  IsometryDefect,
  GenerationFailed,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Every failure raised by the
/// library goes through this type so that front ends can map it to exit
/// statuses and structured diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace qdil
