#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dps {

enum class ErrorCode {
  // parameter validation
  NonPositiveAlpha,
  AlphaAboveOne,
  MLessThanA,
  PowerNotIncreasingPerBit,
  PowerZeroNonzero,
  InvalidParameter,
  // policies and thresholds
  StateOutOfRange,
  InvalidPolicy,
  InfeasibleThresholds,
  EnumerationTooLarge,
  // Markov reward process
  SingularChain,
  NumericalFailure,
  RowDiffCountMismatch,
  DegenerateSegment,
  // linear programming
  IterationLimit,
  DegenerateSolution,
  // files
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dps
