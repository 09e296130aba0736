#include "varigap/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varigap/error.hpp"

namespace varigap {

namespace {

void require_time(double t, double lo, double hi) {
  if (!(t >= lo && t <= hi)) {
    throw Error(ErrorCode::Domain, "time " + std::to_string(t) + " outside [" +
                                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(std::vector<double> times, std::vector<double> values)
    : t_(std::move(times)), y_(std::move(values)) {
  if (t_.size() < 2) throw Error(ErrorCode::InvalidArgument, "polyline needs at least 2 nodes");
  if (t_.size() != y_.size())
    throw Error(ErrorCode::InvalidArgument, "polyline times and values differ in length");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(y_[i]))
      throw Error(ErrorCode::InvalidArgument, "polyline nodes must be finite");
    if (i > 0 && !(t_[i] > t_[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "polyline times must be strictly increasing");
  }
}

std::size_t Polyline::segment_index(double t) const {
  require_time(t, t_.front(), t_.back());
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - t_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, t_.size() - 2);
}

double Polyline::slope(std::size_t i) const { return (y_[i + 1] - y_[i]) / (t_[i + 1] - t_[i]); }

double Polyline::eval(double t) const {
  const std::size_t i = segment_index(t);
  if (t == t_[i]) return y_[i];
  if (t == t_[i + 1]) return y_[i + 1];
  return y_[i] + slope(i) * (t - t_[i]);
}

double Polyline::derivative(double t) const {
  const std::size_t i = segment_index(t);
  if (t == t_[i] || t == t_[i + 1]) {
    throw Error(ErrorCode::AmbiguousPoint,
                "derivative of a piecewise-linear trajectory is ambiguous at node t=" +
                    std::to_string(t));
  }
  return slope(i);
}

double Polyline::lipschitz_constant() const {
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) lip = std::max(lip, std::abs(slope(i)));
  return lip;
}

// ---------------------------------------------------------------------------
// Partition / PLTrajectory

Partition::Partition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw Error(ErrorCode::InvalidArgument, "partition needs >= 2 nodes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw Error(ErrorCode::InvalidArgument, "partition must start at 0 and end at 1");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "partition nodes must be strictly increasing");
  }
}

PLTrajectory::PLTrajectory(Partition partition, std::vector<double> values)
    : path_(std::vector<double>(partition.nodes().begin(), partition.nodes().end()),
            std::move(values)) {}

PLTrajectory::PLTrajectory(Polyline path) : path_(std::move(path)) {
  if (path_.front_time() != 0.0 || path_.back_time() != 1.0)
    throw Error(ErrorCode::InvalidArgument, "trajectory must be defined on [0, 1]");
}

double PLTrajectory::eval(double t) const { return path_.eval(t); }
double PLTrajectory::derivative(double t) const { return path_.derivative(t); }

// ---------------------------------------------------------------------------
// AnalyticTrajectory

const char* to_string(AnalyticFamily family) noexcept {
  switch (family) {
    case AnalyticFamily::Sqrt: return "sqrt";
    case AnalyticFamily::Power: return "power";
    case AnalyticFamily::Affine: return "affine";
    case AnalyticFamily::Constant: return "constant";
  }
  return "unknown";
}

AnalyticTrajectory AnalyticTrajectory::sqrt() { return {AnalyticFamily::Sqrt, 0.0, 0.0}; }

AnalyticTrajectory AnalyticTrajectory::power(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "power exponent must be finite and > 0");
  return {AnalyticFamily::Power, gamma, 0.0};
}

AnalyticTrajectory AnalyticTrajectory::affine(double intercept, double slope) {
  if (!std::isfinite(intercept) || !std::isfinite(slope))
    throw Error(ErrorCode::InvalidArgument, "affine parameters must be finite");
  return {AnalyticFamily::Affine, intercept, slope};
}

AnalyticTrajectory AnalyticTrajectory::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "constant must be finite");
  return {AnalyticFamily::Constant, value, 0.0};
}

bool AnalyticTrajectory::singular_at_zero() const noexcept {
  return family_ == AnalyticFamily::Sqrt || (family_ == AnalyticFamily::Power && a_ < 1.0);
}

double AnalyticTrajectory::eval(double t) const {
  require_time(t, 0.0, 1.0);
  switch (family_) {
    case AnalyticFamily::Sqrt: return std::sqrt(t);
    case AnalyticFamily::Power: return std::pow(t, a_);
    case AnalyticFamily::Affine: return a_ + b_ * t;
    case AnalyticFamily::Constant: return a_;
  }
  return 0.0;
}

double AnalyticTrajectory::derivative(double t) const {
  require_time(t, 0.0, 1.0);
  if (t == 0.0 && singular_at_zero())
    throw Error(ErrorCode::SingularEndpoint, "derivative is unbounded at t=0");
  switch (family_) {
    case AnalyticFamily::Sqrt: return 1.0 / (2.0 * std::sqrt(t));
    case AnalyticFamily::Power: return a_ * std::pow(t, a_ - 1.0);
    case AnalyticFamily::Affine: return b_;
    case AnalyticFamily::Constant: return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Free functions

double eval(const Trajectory& y, double t) {
  return std::visit([t](const auto& x) { return x.eval(t); }, y);
}

double derivative(const Trajectory& y, double t) {
  return std::visit([t](const auto& x) { return x.derivative(t); }, y);
}

RangeBounds range_bounds(const Trajectory& y) {
  if (const auto* pl = std::get_if<PLTrajectory>(&y)) {
    const auto v = pl->values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, *hi};
  }
  const auto& an = std::get<AnalyticTrajectory>(y);
  switch (an.family()) {
    case AnalyticFamily::Sqrt:
    case AnalyticFamily::Power: return {0.0, 1.0};
    case AnalyticFamily::Affine: {
      const double y0 = an.intercept();
      const double y1 = an.intercept() + an.slope();
      return {std::min(y0, y1), std::max(y0, y1)};
    }
    case AnalyticFamily::Constant: return {an.constant_value(), an.constant_value()};
  }
  return {};
}

double SobolevParts::distance(double p) const {
  return std::pow(value_power, 1.0 / p) + std::pow(derivative_power, 1.0 / p);
}

double integrate_abs_linear_power(double d0, double d1, double len, double p) {
  if (len <= 0.0) return 0.0;
  if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
    const double theta = d0 / (d0 - d1);
    return integrate_abs_linear_power(d0, 0.0, theta * len, p) +
           integrate_abs_linear_power(0.0, d1, (1.0 - theta) * len, p);
  }
  const double a = std::abs(d0);
  const double b = std::abs(d1);
  const double m = 0.5 * (a + b);
  if (m == 0.0) return 0.0;
  const double half = 0.5 * std::abs(b - a);
  const double ratio = half / m;
  if (ratio < 1e-4) {
    // Mean of x^p over [m - half, m + half], truncated after the quadratic term.
    return len * std::pow(m, p) * (1.0 + p * (p - 1.0) / 6.0 * ratio * ratio);
  }
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return len * (std::pow(hi, p + 1.0) - std::pow(lo, p + 1.0)) / ((p + 1.0) * (hi - lo));
}

namespace {

std::vector<double> breakpoints(const Trajectory& y) {
  if (const auto* pl = std::get_if<PLTrajectory>(&y)) {
    return {pl->times().begin(), pl->times().end()};
  }
  return {0.0, 1.0};
}

bool singular_at_zero(const Trajectory& y) {
  const auto* an = std::get_if<AnalyticTrajectory>(&y);
  return an != nullptr && an->singular_at_zero();
}

// Derivative on the open segment (s0, s1), which lies inside one piece of
// every piecewise-linear input.
double derivative_in(const Trajectory& y, double t, double s0, double s1) {
  if (const auto* pl = std::get_if<PLTrajectory>(&y)) {
    return pl->slope(pl->path().segment_index(0.5 * (s0 + s1)));
  }
  return std::get<AnalyticTrajectory>(y).derivative(t);
}

}  // namespace

SobolevParts sobolev_parts(const Trajectory& y1, const Trajectory& y2, double p,
                           const QuadConfig& quad) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw Error(ErrorCode::InvalidArgument, "Sobolev exponent p must be finite and >= 1");
  std::vector<double> nodes = breakpoints(y1);
  const std::vector<double> other = breakpoints(y2);
  nodes.insert(nodes.end(), other.begin(), other.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  SobolevParts out;
  const auto* p1 = std::get_if<PLTrajectory>(&y1);
  const auto* p2 = std::get_if<PLTrajectory>(&y2);
  if (p1 != nullptr && p2 != nullptr) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double s0 = nodes[i], s1 = nodes[i + 1];
      const double len = s1 - s0;
      const double d0 = p1->eval(s0) - p2->eval(s0);
      const double d1 = p1->eval(s1) - p2->eval(s1);
      out.value_power += integrate_abs_linear_power(d0, d1, len, p);
      const double mid = 0.5 * (s0 + s1);
      const double ds = p1->slope(p1->path().segment_index(mid)) -
                        p2->slope(p2->path().segment_index(mid));
      out.derivative_power += len * std::pow(std::abs(ds), p);
    }
    return out;
  }

  const bool singular = singular_at_zero(y1) || singular_at_zero(y2);
  bool converged = true;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double s0 = nodes[i], s1 = nodes[i + 1];
    auto value_integrand = [&](double t) {
      return std::pow(std::abs(eval(y1, t) - eval(y2, t)), p);
    };
    auto deriv_integrand = [&](double t) {
      return std::pow(std::abs(derivative_in(y1, t, s0, s1) - derivative_in(y2, t, s0, s1)), p);
    };
    const bool left = singular && i == 0;
    QuadResult rv = integrate(value_integrand, s0, s1, left, false, quad);
    QuadResult rd = integrate(deriv_integrand, s0, s1, left, false, quad);
    for (const QuadResult* r : {&rv, &rd}) {
      if (r->status != QuadStatus::Converged) converged = false;
    }
    out.value_power += std::isfinite(rv.value) ? rv.value : rv.lower_bound;
    out.derivative_power += std::isfinite(rd.value) ? rd.value : rd.lower_bound;
  }
  if (!converged) {
    throw Error(ErrorCode::ToleranceNotMet, "Sobolev distance quadrature did not converge")
        .with_estimate(out.distance(p));
  }
  return out;
}

double sobolev_distance(const Trajectory& y1, const Trajectory& y2, double p,
                        const QuadConfig& quad) {
  return sobolev_parts(y1, y2, p, quad).distance(p);
}

PLTrajectory discretize(const AnalyticTrajectory& y, std::size_t n, double grading) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "discretize needs n >= 2");
  if (!(grading >= 1.0) || !std::isfinite(grading))
    throw Error(ErrorCode::InvalidArgument, "grading must be finite and >= 1");
  std::vector<double> t(n + 1), v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    t[k] = k == n ? 1.0 : std::pow(static_cast<double>(k) / static_cast<double>(n), grading);
    v[k] = y.eval(t[k]);
  }
  return PLTrajectory(Partition(std::move(t)), std::move(v));
}

}  // namespace varigap
