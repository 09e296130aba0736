#include "varigap/functional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varigap/error.hpp"

namespace varigap {

const char* to_string(EnergyStatus status) noexcept {
  switch (status) {
    case EnergyStatus::Converged: return "converged";
    case EnergyStatus::Diverged: return "diverged";
    case EnergyStatus::Capped: return "capped";
    case EnergyStatus::SingularEndpointLimit: return "singular-endpoint-limit";
  }
  return "unknown";
}

const char* to_string(CertificateVerdict v) noexcept {
  return v == CertificateVerdict::Divergent ? "divergent" : "inconclusive";
}

namespace {

EnergyStatus from_quad(QuadStatus s) {
  switch (s) {
    case QuadStatus::Converged: return EnergyStatus::Converged;
    case QuadStatus::Diverged: return EnergyStatus::Diverged;
    case QuadStatus::Capped: return EnergyStatus::Capped;
    case QuadStatus::SingularEndpointLimit: return EnergyStatus::SingularEndpointLimit;
  }
  return EnergyStatus::SingularEndpointLimit;
}

bool is_infinite_status(EnergyStatus s) {
  return s == EnergyStatus::Diverged || s == EnergyStatus::Capped;
}

[[noreturn]] void rethrow_with_point(const Error& e, double t, double y, double v) {
  throw Error(e.code(),
              std::string(e.what()) + " (at t=" + std::to_string(t) + ", y=" + std::to_string(y) +
                  ", v=" + std::to_string(v) + ")",
              e.position());
}

EnergyResult to_energy(const QuadResult& q) {
  EnergyResult r;
  r.status = from_quad(q.status);
  r.lower_bound = q.lower_bound;
  r.value = is_infinite_status(r.status) ? ExtendedValue::infinity()
                                         : ExtendedValue::finite(std::max(0.0, q.value));
  return r;
}

// Folds `next` into the running total; returns false once the total is +inf.
bool accumulate(EnergyResult& total, const EnergyResult& next) {
  total.segments_evaluated += next.segments_evaluated;
  total.lower_bound += next.lower_bound;
  if (is_infinite_status(next.status)) {
    total.status = next.status;
    total.value = ExtendedValue::infinity();
    return false;
  }
  total.value = total.value + next.value;
  if (next.status == EnergyStatus::SingularEndpointLimit)
    total.status = EnergyStatus::SingularEndpointLimit;
  return true;
}

}  // namespace

EnergyResult segment_energy(const Lagrangian& L, double t0, double t1, double y0, double slope,
                            const QuadConfig& quad, double offset) {
  EnergyResult out;
  out.segments_evaluated = 1;
  const double len = t1 - t0;
  if (!(len > 0.0)) return out;

  if (slope == 0.0) {
    ExtendedValue density;
    try {
      density = L(y0, 0.0);
    } catch (const Error& e) {
      rethrow_with_point(e, t0, y0, 0.0);
    }
    if (density.is_infinite()) {
      out.status = EnergyStatus::Diverged;
      out.value = ExtendedValue::infinity();
      return out;
    }
    out.value = scale(density, len);
    if (out.value.is_infinite() || offset + out.value.to_double() > quad.cap) {
      out.status = EnergyStatus::Capped;
      out.value = ExtendedValue::infinity();
      return out;
    }
    out.lower_bound = out.value.to_double();
    return out;
  }

  auto integrand = [&](double t) {
    const double y = y0 + slope * (t - t0);
    try {
      return L.eval_double(y, slope);
    } catch (const Error& e) {
      rethrow_with_point(e, t, y, slope);
    }
  };
  const double y1 = y0 + slope * len;
  if ((y0 < 0.0 && y1 > 0.0) || (y0 > 0.0 && y1 < 0.0)) {
    const double root = t0 + len * (y0 / (y0 - y1));
    EnergyResult left = to_energy(integrate(integrand, t0, root, false, true, quad, offset));
    if (is_infinite_status(left.status)) {
      left.segments_evaluated = 1;
      return left;
    }
    const EnergyResult right =
        to_energy(integrate(integrand, root, t1, true, false, quad, offset + left.value.to_double()));
    EnergyResult total = left;
    total.segments_evaluated = 0;
    accumulate(total, right);
    total.segments_evaluated = 1;
    return total;
  }
  EnergyResult r = to_energy(integrate(integrand, t0, t1, y0 == 0.0, y1 == 0.0, quad, offset));
  r.segments_evaluated = 1;
  return r;
}

EnergyResult energy(const Lagrangian& L, const Trajectory& y, const QuadConfig& quad) {
  quad.validate();
  EnergyResult total;
  if (const auto* pl = std::get_if<PLTrajectory>(&y)) {
    const auto t = pl->times();
    const auto v = pl->values();
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const EnergyResult seg =
          segment_energy(L, t[i], t[i + 1], v[i], pl->slope(i), quad, total.value.to_double());
      if (!accumulate(total, seg)) break;
    }
    return total;
  }

  const auto& an = std::get<AnalyticTrajectory>(y);
  if (an.family() == AnalyticFamily::Constant || an.family() == AnalyticFamily::Affine) {
    const double slope = an.family() == AnalyticFamily::Affine ? an.slope() : 0.0;
    accumulate(total, segment_energy(L, 0.0, 1.0, an.eval(0.0), slope, quad));
    return total;
  }
  auto integrand = [&](double t) {
    const double yt = an.eval(t);
    const double vt = an.derivative(t);
    try {
      return L.eval_double(yt, vt);
    } catch (const Error& e) {
      rethrow_with_point(e, t, yt, vt);
    }
  };
  EnergyResult r = to_energy(integrate_toward_end(integrand, 0.0, 1.0, SingularEnd::Left, quad));
  r.segments_evaluated = 1;
  accumulate(total, r);
  return total;
}

// ---------------------------------------------------------------------------

GapCertificate gap_certificate(const PLTrajectory& y, const QuadConfig& quad, int terms) {
  quad.validate();
  if (terms < 1) throw Error(ErrorCode::InvalidArgument, "certificate needs at least one term");
  const auto t = y.times();
  const auto v = y.values();
  const std::size_t n = t.size();
  if (v[0] != 0.0) throw Error(ErrorCode::Precondition, "gap certificate requires y(0) = 0");
  std::size_t first = 0;
  while (first < n && v[first] == 0.0) ++first;
  if (first == n) {
    throw Error(ErrorCode::Precondition, "gap certificate requires y not identically 0");
  }

  GapCertificate cert;
  cert.a = t[first - 1];
  cert.lipschitz = y.path().lipschitz_constant();
  cert.threshold = 1.0 / (4.0 * cert.lipschitz);

  // End e of the component of {y != 0} that starts at a.
  double e = 1.0;
  bool zero_at_e = false;
  for (std::size_t j = first - 1; j + 1 < n; ++j) {
    if (v[j + 1] == 0.0) {
      e = t[j + 1];
      zero_at_e = true;
      break;
    }
    if (j >= first && ((v[j] > 0.0) != (v[j + 1] > 0.0))) {
      e = t[j] + (t[j + 1] - t[j]) * (v[j] / (v[j] - v[j + 1]));
      zero_at_e = true;
      break;
    }
  }

  // d: end of the first stretch where |y| increases strictly, cut where |y|
  // reaches the threshold. On (a, d] the pointwise inequality behind the
  // 1/32 factor holds, and 1/|y(c)| decreases in c.
  double d = cert.a;
  for (std::size_t j = first - 1; j + 1 < n; ++j) {
    const double lo = std::abs(v[j]);
    const double hi = std::abs(v[j + 1]);
    const bool same_side = j < first || ((v[j] > 0.0) == (v[j + 1] > 0.0));
    if (!same_side || !(hi > lo)) break;
    if (hi >= cert.threshold) {
      const double frac = (cert.threshold - lo) / (hi - lo);
      d = std::min(t[j + 1], t[j] + frac * (t[j + 1] - t[j]));
      if (!(d > t[j])) d = t[j + 1];
      break;
    }
    d = t[j + 1];
  }
  if (!(d > cert.a)) throw Error(ErrorCode::Internal, "gap certificate: no admissible d");
  cert.d = d;
  cert.b = zero_at_e ? d + 0.5 * (e - d) : e;
  if (cert.b < d) cert.b = d;

  // Fixed terms over [d, b], integrated piece by piece.
  const double lip2 = cert.lipschitz * cert.lipschitz;
  double neg = 0.0, pos = 0.0;
  if (cert.b > d) {
    const std::size_t j0 = y.path().segment_index(d);
    for (std::size_t j = j0; j + 1 < n && t[j] < cert.b; ++j) {
      const double s0 = std::max(t[j], d);
      const double s1 = std::min(t[j + 1], cert.b);
      if (!(s1 > s0)) continue;
      const double s = y.slope(j);
      auto yat = [&](double x) { return v[j] + s * (x - t[j]); };
      auto f2 = [&](double x) {
        const double yy = yat(x);
        return s * s / (yy * yy);
      };
      auto f4 = [&](double x) {
        const double yy = yat(x);
        return s * s / (yy * yy * yy * yy);
      };
      QuadConfig fine = quad;
      fine.cap = std::numeric_limits<double>::max();
      const QuadResult r2 = integrate_adaptive(f2, s0, s1, fine);
      const QuadResult r4 = integrate_adaptive(f4, s0, s1, fine);
      if (r2.status != QuadStatus::Converged || r4.status != QuadStatus::Converged) {
        throw Error(ErrorCode::ToleranceNotMet, "gap certificate: fixed terms did not converge");
      }
      neg += r2.value;
      pos += r4.value;
    }
  }
  cert.fixed_terms = -0.5 * lip2 * neg + pos / 16.0;

  const double inv_yd = 1.0 / y.eval(d);
  double scale_k = 1.0;
  for (int k = 1; k <= terms; ++k) {
    scale_k *= 0.5;
    const double c = cert.a + (d - cert.a) * scale_k;
    const double yc = y.eval(c);
    const double gap = 1.0 / yc - inv_yd;
    const double jensen = (1.0 / 32.0) * (1.0 / (d - c)) * gap * gap;
    cert.c_sequence.push_back(c);
    cert.bounds.push_back(cert.fixed_terms + jensen);
  }
  bool increasing = true;
  for (std::size_t k = 1; k < cert.bounds.size(); ++k) {
    if (!(cert.bounds[k] > cert.bounds[k - 1])) increasing = false;
  }
  cert.verdict = increasing && cert.bounds.back() > quad.cap / 10.0
                     ? CertificateVerdict::Divergent
                     : CertificateVerdict::Inconclusive;
  return cert;
}

DivergenceReport verify_divergence_consistency(const PLTrajectory& y, const Lagrangian& L,
                                               const QuadConfig& quad) {
  if (!L.is_builtin("gap_example")) {
    throw Error(ErrorCode::Precondition,
                "divergence consistency check applies to the gap_example Lagrangian only");
  }
  DivergenceReport rep;
  rep.certificate = gap_certificate(y, quad);
  rep.energy = energy(L, y, quad);
  const bool energy_infinite = rep.energy.value.is_infinite();
  const bool cert_divergent = rep.certificate.verdict == CertificateVerdict::Divergent;
  rep.consistent = energy_infinite && cert_divergent;
  if (rep.consistent) {
    rep.message = "both detectors report divergence";
  } else {
    rep.message = std::string("detector mismatch: energy status ") + to_string(rep.energy.status) +
                  ", certificate " + to_string(rep.certificate.verdict);
  }
  return rep;
}

}  // namespace varigap
