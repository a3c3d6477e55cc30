#pragma once

#include <stdexcept>
#include <string>

namespace rhg {

enum class ErrorCode {
  Unrealizable,
  ZeroLambda,
  DimensionMismatch,
  OffLattice,
  AxisKindMismatch,
  NegativeDegree,
  BadOrder,
  SupportOverflow,
  TruncationTooSmall,
  InterpolationOverflow,
  GridMismatch,
  OutOfWindow,
  BadExponent,
  ZeroC,
  KernelTooLarge,
  BadAlpha,
  BadRange,
  UnknownSuite,
  ConfigInvalid,
  IoFailure,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rhg
