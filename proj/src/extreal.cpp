#include "varigap/extreal.hpp"

#include <cmath>
#include <string>

#include "varigap/error.hpp"

namespace varigap {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Evaluation: return "evaluation";
    case ErrorCode::Nonnegativity: return "nonnegativity-violated";
    case ErrorCode::AmbiguousPoint: return "ambiguous-point";
    case ErrorCode::SingularEndpoint: return "singular-endpoint";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::ConditionSign: return "condition-R-sign-failure";
    case ErrorCode::ConditionViolated: return "condition-violated";
    case ErrorCode::ToleranceNotMet: return "tolerance-not-met";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

ExtendedValue ExtendedValue::finite(double v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::Domain, "extended value must be finite and nonnegative, got " +
                                       std::to_string(v));
  }
  ExtendedValue e;
  e.value_ = v;
  return e;
}

ExtendedValue ExtendedValue::from_double(double v) {
  if (v == std::numeric_limits<double>::infinity()) return infinity();
  return finite(v);
}

double ExtendedValue::value() const {
  if (infinite_) throw Error(ErrorCode::Domain, "infinite extended value has no finite payload");
  return value_;
}

ExtendedValue add(ExtendedValue a, ExtendedValue b) noexcept {
  if (a.is_infinite() || b.is_infinite()) return ExtendedValue::infinity();
  const double s = a.to_double() + b.to_double();
  if (std::isinf(s)) return ExtendedValue::infinity();
  return ExtendedValue::finite(s);
}

ExtendedValue scale(ExtendedValue a, double c) {
  if (!std::isfinite(c) || c < 0.0) {
    throw Error(ErrorCode::Domain, "scale factor must be finite and nonnegative");
  }
  if (c == 0.0) return ExtendedValue{};
  if (a.is_infinite()) return a;
  const double s = a.to_double() * c;
  if (std::isinf(s)) return ExtendedValue::infinity();
  return ExtendedValue::finite(s);
}

}  // namespace varigap
