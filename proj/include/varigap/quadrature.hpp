#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "varigap/error.hpp"

namespace varigap {

struct QuadConfig {
  double tol = 1e-8;             // relative tolerance
  double cap = 1e12;             // partial sums above this are reported as capped
  int max_depth = 40;            // bisection depth limit of the adaptive rule
  double singular_split = 2.0;   // geometric ratio of endpoint refinement

  void validate() const;
};

enum class QuadStatus { Converged, Diverged, Capped, SingularEndpointLimit };

const char* to_string(QuadStatus status) noexcept;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  // Sum of (estimate - error) over accepted pieces; for nonnegative integrands
  // a conservative partial sum.
  double lower_bound = 0.0;
  QuadStatus status = QuadStatus::Converged;
  std::size_t evaluations = 0;
};

namespace quad_detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Errors below this much per unit length are accepted regardless of the
// relative tolerance; keeps rounding noise from forcing endless bisection.
inline constexpr double kAbsFloorDensity = 1e-18;
// Geometric refinement: pieces below tol * kNegligibleFactor * max(1, |sum|)
// count as negligible.
inline constexpr double kNegligibleFactor = 1e-4;
inline constexpr int kNegligibleRun = 3;
inline constexpr int kMinLevelsBeforeNegligible = 12;
inline constexpr int kNonDecayRun = 8;
inline constexpr double kDecayMargin = 1e-6;
inline constexpr int kMaxLevels = 400;
inline constexpr std::size_t kMaxEvaluations = 20'000'000;

struct Rule {
  double kronrod = 0.0;
  double gauss = 0.0;
  bool hit_infinity = false;
};

template <class F>
Rule gauss_kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Rule r;
  double fc = f(c);
  if (std::isinf(fc)) r.hit_infinity = true;
  r.kronrod = fc * kWgk[7];
  r.gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    if (std::isinf(f1) || std::isinf(f2)) r.hit_infinity = true;
    r.kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) r.gauss += kWg[j / 2] * (f1 + f2);
  }
  r.kronrod *= h;
  r.gauss *= h;
  return r;
}

}  // namespace quad_detail

/// Adaptive 15-point Gauss-Kronrod quadrature on [a, b], bisecting
/// depth-first and left-first so the accumulated sum is reproducible.
/// `offset` is the partial sum already accumulated by the caller; the cap
/// applies to offset + running sum. Returns status Diverged if the integrand
/// returns +inf at a sample point.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadConfig& cfg,
                              double offset = 0.0) {
  using namespace quad_detail;
  QuadResult out;
  if (!(b > a)) return out;
  struct Item {
    double a, b;
    int depth;
  };
  std::vector<Item> stack;
  stack.push_back({a, b, 0});
  bool limited = false;
  // Magnitude of the first whole-interval estimate. A piece also passes when
  // its error is within tol of this scale, prorated by width, so kinks and
  // zeros of the integrand do not force bisection to the depth limit.
  double scale = -1.0;
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const Rule r = gauss_kronrod15(f, it.a, it.b);
    out.evaluations += 15;
    if (r.hit_infinity) {
      out.status = QuadStatus::Diverged;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    if (std::isnan(r.kronrod)) {
      throw Error(ErrorCode::Internal, "integrand produced NaN");
    }
    if (offset + out.value + r.kronrod > cfg.cap || std::isinf(r.kronrod)) {
      out.status = QuadStatus::Capped;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    const double err = std::abs(r.kronrod - r.gauss);
    if (scale < 0.0) scale = std::abs(r.kronrod);
    const double share = (it.b - it.a) / (b - a);
    const bool ok = err <= cfg.tol * std::abs(r.kronrod) ||
                    err <= cfg.tol * scale * share ||
                    err <= kAbsFloorDensity * (it.b - it.a);
    const double mid = 0.5 * (it.a + it.b);
    const bool splittable = mid > it.a && mid < it.b;
    if (ok || it.depth >= cfg.max_depth || !splittable ||
        out.evaluations >= kMaxEvaluations) {
      if (!ok) limited = true;
      out.value += r.kronrod;
      out.error += err;
      out.lower_bound += std::max(0.0, r.kronrod - err);
      continue;
    }
    // Right half first onto the stack so the left half is processed first.
    stack.push_back({mid, it.b, it.depth + 1});
    stack.push_back({it.a, mid, it.depth + 1});
  }
  if (limited) out.status = QuadStatus::SingularEndpointLimit;
  return out;
}

enum class SingularEnd { Left, Right };

/// Integral over [a, b] for an integrand that may be singular at one end.
/// The interval is cut into geometric pieces shrinking toward the singular
/// end by the ratio cfg.singular_split; each piece is integrated adaptively.
/// Stops when the geometric tail estimate drops below tol * |sum|, when a run
/// of pieces is negligible, or reports Diverged when pieces stop decaying.
template <class F>
QuadResult integrate_toward_end(F&& f, double a, double b, SingularEnd end,
                                const QuadConfig& cfg, double offset = 0.0) {
  using namespace quad_detail;
  QuadResult out;
  if (!(b > a)) return out;
  const double h = b - a;
  const double anchor = end == SingularEnd::Left ? a : b;
  const double r = cfg.singular_split;
  const double min_width =
      8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(anchor), 1e-300);
  double prev = -1.0, prev2 = -1.0;
  int negligible_run = 0;
  int non_decay_run = 0;
  bool limited = false;
  double far = h;  // distance of the far end of the current piece from the anchor
  for (int level = 0; level < kMaxLevels; ++level) {
    const double near = far / r;
    if (far - near < min_width || near <= 0.0) {
      limited = true;
      break;
    }
    const double lo = end == SingularEnd::Left ? a + near : b - far;
    const double hi = end == SingularEnd::Left ? (level == 0 ? b : a + far) : b - near;
    const QuadResult piece = integrate_adaptive(f, lo, hi, cfg, offset + out.value);
    out.evaluations += piece.evaluations;
    if (piece.status == QuadStatus::Diverged || piece.status == QuadStatus::Capped) {
      out.status = piece.status;
      out.lower_bound += piece.lower_bound;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    if (piece.status == QuadStatus::SingularEndpointLimit) limited = true;
    out.value += piece.value;
    out.error += piece.error;
    out.lower_bound += piece.lower_bound;
    if (offset + out.value > cfg.cap) {
      out.status = QuadStatus::Capped;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    const double p = std::abs(piece.value);
    const double negligible = cfg.tol * kNegligibleFactor * std::max(1.0, std::abs(out.value));
    negligible_run = p <= negligible ? negligible_run + 1 : 0;
    if (negligible_run >= kNegligibleRun && level + 1 >= kMinLevelsBeforeNegligible) {
      out.status = limited ? QuadStatus::SingularEndpointLimit : QuadStatus::Converged;
      return out;
    }
    if (prev > 0.0 && prev2 > 0.0) {
      const double q = std::max(p / prev, prev / prev2);
      if (q < 1.0 - kDecayMargin) {
        const double tail = p * q / (1.0 - q);
        if (tail <= cfg.tol * std::abs(out.value)) {
          out.value += tail;
          out.error += tail;
          out.status = limited ? QuadStatus::SingularEndpointLimit : QuadStatus::Converged;
          return out;
        }
      }
    }
    if (prev > 0.0 && p >= (1.0 - kDecayMargin) * prev && p > negligible) {
      if (++non_decay_run >= kNonDecayRun) {
        out.status = QuadStatus::Diverged;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
    } else {
      non_decay_run = 0;
    }
    prev2 = prev;
    prev = p;
    far = near;
  }
  out.status = QuadStatus::SingularEndpointLimit;
  return out;
}

/// Integral over [a, b] with optional endpoint refinement at either end.
template <class F>
QuadResult integrate(F&& f, double a, double b, bool singular_left, bool singular_right,
                     const QuadConfig& cfg, double offset = 0.0) {
  if (!singular_left && !singular_right) return integrate_adaptive(f, a, b, cfg, offset);
  if (singular_left && !singular_right)
    return integrate_toward_end(f, a, b, SingularEnd::Left, cfg, offset);
  if (!singular_left && singular_right)
    return integrate_toward_end(f, a, b, SingularEnd::Right, cfg, offset);
  const double mid = 0.5 * (a + b);
  QuadResult left = integrate_toward_end(f, a, mid, SingularEnd::Left, cfg, offset);
  if (left.status == QuadStatus::Diverged || left.status == QuadStatus::Capped) return left;
  QuadResult right =
      integrate_toward_end(f, mid, b, SingularEnd::Right, cfg, offset + left.value);
  right.evaluations += left.evaluations;
  if (right.status == QuadStatus::Diverged || right.status == QuadStatus::Capped) {
    right.lower_bound += left.lower_bound;
    return right;
  }
  right.value += left.value;
  right.error += left.error;
  right.lower_bound += left.lower_bound;
  if (left.status == QuadStatus::SingularEndpointLimit)
    right.status = QuadStatus::SingularEndpointLimit;
  return right;
}

}  // namespace varigap
