#include "varigap/quadrature.hpp"

namespace varigap {

void QuadConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw Error(ErrorCode::InvalidArgument, "quadrature tol must be positive");
  if (!(cap > 1.0)) throw Error(ErrorCode::InvalidArgument, "quadrature cap must exceed 1");
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "quadrature max_depth must be >= 1");
  if (!(singular_split > 1.0) || !std::isfinite(singular_split))
    throw Error(ErrorCode::InvalidArgument, "singular_split must be a finite ratio > 1");
}

const char* to_string(QuadStatus status) noexcept {
  switch (status) {
    case QuadStatus::Converged: return "converged";
    case QuadStatus::Diverged: return "diverged";
    case QuadStatus::Capped: return "capped";
    case QuadStatus::SingularEndpointLimit: return "singular-endpoint-limit";
  }
  return "unknown";
}

}  // namespace varigap
