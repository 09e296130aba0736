#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace varigap {

enum class ErrorCode {
  InvalidArgument,
  Domain,
  Parse,
  Evaluation,
  Nonnegativity,
  AmbiguousPoint,
  SingularEndpoint,
  Precondition,
  ConditionSign,
  ConditionViolated,
  ToleranceNotMet,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library. `position` is a 1-based character
// offset into the expression text for parse and evaluation errors, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int position = 0)
      : std::runtime_error(message), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }
  int position() const noexcept { return position_; }

  // Best available estimate when a numerical tolerance was not met.
  const std::optional<double>& estimate() const noexcept { return estimate_; }
  Error& with_estimate(double value) {
    estimate_ = value;
    return *this;
  }

 private:
  ErrorCode code_;
  int position_;
  std::optional<double> estimate_;
};

}  // namespace varigap
