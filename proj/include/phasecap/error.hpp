#pragma once

#include <stdexcept>
#include <string>

namespace phasecap {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  Io,
  Format,
  OutOfSpan,
  NoMinimizer,
  UndefinedDecomposition,
  KnotAlignment,
  NonMonotone,
  ComparisonViolation,
  Admissibility,
  NonConvergence,
  EmptyRegion,
  TooFewRows,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure carries a machine-readable code so
/// the CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phasecap
