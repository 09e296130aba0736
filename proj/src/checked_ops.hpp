#pragma once

// Arithmetic on doubles with the evaluation contract of expressions:
// +inf is a legal intermediate, NaN never escapes. Shared by the compiled
// evaluator and the native builtin Lagrangians so both agree bit for bit.

#include <cmath>
#include <string>

#include "varigap/error.hpp"

namespace varigap::detail {

[[noreturn]] inline void eval_fail(const std::string& what, int pos) {
  std::string msg = "evaluation error";
  if (pos > 0) msg += " at position " + std::to_string(pos);
  throw Error(ErrorCode::Evaluation, msg + ": " + what, pos);
}

inline double checked_add(double a, double b, int pos) {
  const double r = a + b;
  if (std::isnan(r)) eval_fail("indeterminate form inf - inf", pos);
  return r;
}

inline double checked_sub(double a, double b, int pos) {
  const double r = a - b;
  if (std::isnan(r)) eval_fail("indeterminate form inf - inf", pos);
  return r;
}

inline double checked_mul(double a, double b, int pos) {
  if ((a == 0.0 && std::isinf(b)) || (std::isinf(a) && b == 0.0))
    eval_fail("indeterminate form 0 * inf", pos);
  return a * b;
}

inline double checked_div(double a, double b, int pos) {
  if (b == 0.0) {
    if (a > 0.0) return HUGE_VAL;
    if (a == 0.0) eval_fail("indeterminate form 0/0", pos);
    eval_fail("division of a negative value by zero", pos);
  }
  const double r = a / b;
  if (std::isnan(r)) eval_fail("indeterminate form inf/inf", pos);
  return r;
}

inline double checked_pow(double a, double b, int pos) {
  // libm pow may differ from a * a by an ulp; squares are common enough to
  // pin down so compiled and native code agree.
  if (b == 2.0) return a * a;
  const double r = std::pow(a, b);
  if (std::isnan(r)) eval_fail("power undefined for these operands", pos);
  return r;
}

inline double checked_sqrt(double a, int pos) {
  if (a < 0.0) eval_fail("sqrt of a negative value", pos);
  return std::sqrt(a);
}

inline double checked_log(double a, int pos) {
  if (a < 0.0) eval_fail("log of a negative value", pos);
  return std::log(a);
}

}  // namespace varigap::detail
