#include "varigap/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "varigap/error.hpp"

namespace varigap {

const char* to_string(VerdictStatus s) noexcept {
  switch (s) {
    case VerdictStatus::NoViolationFound: return "no-violation-found";
    case VerdictStatus::Violation: return "violation";
    case VerdictStatus::InvalidInput: return "invalid-input";
  }
  return "unknown";
}

const char* to_string(WitnessKind k) noexcept {
  switch (k) {
    case WitnessKind::ExceedsCap: return "exceeds-cap";
    case WitnessKind::Infinite: return "infinite";
    case WitnessKind::SignFailure: return "sign-failure";
    case WitnessKind::Error: return "error";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kTopCount = 5;
constexpr std::size_t kRefine1d = 256;
constexpr std::size_t kRefine2d = 64;
constexpr std::size_t kRhoRefine = 64;

void check_interval(Interval J) {
  if (!std::isfinite(J.lo) || !std::isfinite(J.hi) || J.lo > J.hi)
    throw Error(ErrorCode::InvalidArgument, "interval must be finite with lo <= hi");
}

std::vector<double> grid(Interval J, std::size_t n) {
  if (J.lo == J.hi) return {J.lo};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = i + 1 == n ? J.hi : J.lo + J.length() * (static_cast<double>(i) / (n - 1));
  }
  return g;
}

// Points strictly inside [lo, hi].
std::vector<double> interior(double lo, double hi, std::size_t n) {
  std::vector<double> g;
  if (!(hi > lo)) return g;
  g.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) g.push_back(lo + (hi - lo) * (static_cast<double>(j) / (n + 1)));
  return g;
}

// Accumulates evaluations in grid order; the first offending point becomes
// the witness, later ones only update the sup estimate.
class Scanner {
 public:
  explicit Scanner(double cap) : cap_(cap) {}

  // Returns the value for ranking, or -inf when no finite value was produced.
  double evaluate(const Lagrangian& L, double y, double v, std::optional<RhoSide> side) {
    double value;
    try {
      value = L.eval_double(y, v);
    } catch (const Error& e) {
      record_error(y, v, side, e);
      return -std::numeric_limits<double>::infinity();
    }
    if (std::isinf(value)) {
      verdict_.sup_infinite = true;
      record(WitnessKind::Infinite, y, v, value, side);
      return -std::numeric_limits<double>::infinity();
    }
    verdict_.sup_estimate = std::max(verdict_.sup_estimate, value);
    if (value > cap_) record(WitnessKind::ExceedsCap, y, v, value, side);
    return value;
  }

  // L on the graph of rho at z; returns the larger of the two values.
  double graph(const Lagrangian& L, const RhoPair& rho, double z) {
    double best = -std::numeric_limits<double>::infinity();
    for (const RhoSide side : {RhoSide::Minus, RhoSide::Plus}) {
      double r;
      try {
        r = rho.eval_unchecked(side, z);
      } catch (const Error& e) {
        record_error(z, 0.0, side, e);
        continue;
      }
      if (!std::isfinite(r)) {
        record_error(z, r, side,
                     Error(ErrorCode::Evaluation, "rho value is not finite"));
        continue;
      }
      const bool sign_ok = side == RhoSide::Plus ? r > 0.0 : r < 0.0;
      if (!sign_ok) {
        record(WitnessKind::SignFailure, z, r, r, side);
        continue;
      }
      best = std::max(best, evaluate(L, z, r, side));
    }
    return best;
  }

  Verdict finish(const char* what) {
    if (verdict_.status == VerdictStatus::NoViolationFound) {
      verdict_.message = std::string(what) + ": no violation found on the sampled grid";
    }
    return verdict_;
  }

  Verdict& verdict() { return verdict_; }

 private:
  void record(WitnessKind kind, double y, double v, double value, std::optional<RhoSide> side) {
    if (verdict_.witness) return;
    verdict_.status = VerdictStatus::Violation;
    verdict_.witness = Witness{kind, y, v, value, side};
    verdict_.message = describe(kind, y, v, value, side);
  }

  void record_error(double y, double v, std::optional<RhoSide> side, const Error& e) {
    if (verdict_.witness) return;
    verdict_.status = VerdictStatus::InvalidInput;
    verdict_.witness = Witness{WitnessKind::Error, y, v, std::nan(""), side};
    verdict_.message = e.what();
    if (e.position() > 0) verdict_.message += " at position " + std::to_string(e.position());
  }

  static std::string describe(WitnessKind kind, double y, double v, double value,
                              std::optional<RhoSide> side) {
    std::string s = to_string(kind);
    s += " at (" + std::to_string(y) + ", " + std::to_string(v) + ")";
    if (side) s += std::string(" on rho") + (*side == RhoSide::Plus ? "+" : "-");
    if (kind != WitnessKind::SignFailure) s += ", value " + std::to_string(value);
    return s;
  }

  double cap_;
  Verdict verdict_;
};

std::vector<std::size_t> top_indices(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  idx.resize(std::min(kTopCount, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <class Probe>
Verdict scan_line(Interval J, std::size_t samples, double cap, const char* what, Probe probe) {
  check_interval(J);
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "at least two samples are required");
  if (!(cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "cap must be positive");
  Scanner sc(cap);
  const std::vector<double> g = grid(J, samples);
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) values[i] = probe(sc, g[i]);
  std::size_t refined = 0;
  if (g.size() > 1) {
    for (const std::size_t i : top_indices(values)) {
      const double lo = g[i == 0 ? 0 : i - 1];
      const double hi = g[std::min(i + 1, g.size() - 1)];
      for (const double z : interior(lo, hi, kRefine1d)) {
        probe(sc, z);
        ++refined;
      }
    }
  }
  sc.verdict().resolution = Resolution{samples, J, std::nullopt, refined};
  return sc.finish(what);
}

}  // namespace

Verdict check_R(const Lagrangian& L, const RhoPair& rho, Interval J, std::size_t samples,
                double cap) {
  return scan_line(J, samples, cap, "condition R",
                   [&](Scanner& sc, double z) { return sc.graph(L, rho, z); });
}

Verdict check_Ry(const Lagrangian& L, const RhoPair& rho, const Trajectory& y,
                 std::size_t samples, double cap) {
  const RangeBounds rb = range_bounds(y);
  Verdict v = check_R(L, rho, Interval{rb.alpha, rb.beta}, samples, cap);
  if (v.status == VerdictStatus::NoViolationFound)
    v.message = "condition R_y: no violation found on the sampled grid";
  return v;
}

Verdict check_zero_speed(const Lagrangian& L, Interval J, std::size_t samples, double cap) {
  return scan_line(J, samples, cap, "zero-speed bound",
                   [&](Scanner& sc, double z) { return sc.evaluate(L, z, 0.0, std::nullopt); });
}

Verdict check_B(const Lagrangian& L, double K, double r, std::size_t samples_per_axis,
                double cap) {
  if (!(K > 0.0) || !(r > 0.0) || !std::isfinite(K) || !std::isfinite(r))
    throw Error(ErrorCode::InvalidArgument, "K and r must be positive and finite");
  if (samples_per_axis < 2)
    throw Error(ErrorCode::InvalidArgument, "at least two samples per axis are required");
  if (!(cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "cap must be positive");
  Scanner sc(cap);
  const std::vector<double> gy = grid({-K, K}, samples_per_axis);
  const std::vector<double> gv = grid({-r, r}, samples_per_axis);
  const std::size_t n = samples_per_axis;
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      values[i * n + j] = sc.evaluate(L, gy[i], gv[j], std::nullopt);
  std::size_t refined = 0;
  for (const std::size_t k : top_indices(values)) {
    const std::size_t i = k / n, j = k % n;
    const double ylo = gy[i == 0 ? 0 : i - 1], yhi = gy[std::min(i + 1, n - 1)];
    const double vlo = gv[j == 0 ? 0 : j - 1], vhi = gv[std::min(j + 1, n - 1)];
    for (const double yy : interior(ylo, yhi, kRefine2d))
      for (const double vv : interior(vlo, vhi, kRefine2d)) {
        sc.evaluate(L, yy, vv, std::nullopt);
        ++refined;
      }
  }
  sc.verdict().resolution = Resolution{n, Interval{-K, K}, Interval{-r, r}, refined};
  return sc.finish("condition B");
}

RhoBounds rho_bounds(const RhoPair& rho, Interval J, std::size_t samples) {
  check_interval(J);
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "at least two samples are required");
  const std::vector<double> g = grid(J, samples);
  std::vector<double> lo(g.size()), hi(g.size());
  auto at = [&](double z, double& mn, double& mx) {
    const double p = rho.eval(RhoSide::Plus, z);
    const double m = -rho.eval(RhoSide::Minus, z);
    mn = std::min(p, m);
    mx = std::max(p, m);
  };
  for (std::size_t i = 0; i < g.size(); ++i) at(g[i], lo[i], hi[i]);
  const std::size_t imin = static_cast<std::size_t>(std::min_element(lo.begin(), lo.end()) - lo.begin());
  const std::size_t imax = static_cast<std::size_t>(std::max_element(hi.begin(), hi.end()) - hi.begin());
  RhoBounds b{lo[imin], hi[imax]};
  for (const std::size_t i : {imin, imax}) {
    if (g.size() < 2) break;
    const double a = g[i == 0 ? 0 : i - 1];
    const double c = g[std::min(i + 1, g.size() - 1)];
    for (const double z : interior(a, c, kRhoRefine)) {
      double mn, mx;
      at(z, mn, mx);
      b.rho_min = std::min(b.rho_min, mn);
      b.rho_max = std::max(b.rho_max, mx);
    }
  }
  return b;
}

namespace {

double sup_of(const Verdict& v) {
  if (v.status == VerdictStatus::InvalidInput) throw Error(ErrorCode::Evaluation, v.message);
  if (v.witness && v.witness->kind == WitnessKind::SignFailure)
    throw Error(ErrorCode::ConditionSign, v.message);
  return v.sup_infinite ? std::numeric_limits<double>::infinity() : v.sup_estimate;
}

}  // namespace

double rho_graph_sup(const Lagrangian& L, const RhoPair& rho, Interval J, std::size_t samples) {
  return sup_of(check_R(L, rho, J, samples, std::numeric_limits<double>::max()));
}

double zero_speed_sup(const Lagrangian& L, Interval J, std::size_t samples) {
  return sup_of(check_zero_speed(L, J, samples, std::numeric_limits<double>::max()));
}

}  // namespace varigap
