#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latcover {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SingularBasis,
  EnumerationBudgetExceeded,
  GridTooCoarse,
  DensityOutOfRange,
  InfeasibleDimensions,
  UnknownName,
  BisectionStalled,
  NotALatticePoint,
  NotUnimodular,
  MaxTriesExceeded,
  CoverageCheckFailed,
  MalformedInput,
  UnknownCommand,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace latcover
