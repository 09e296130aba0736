#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "varigap/quadrature.hpp"

namespace varigap {

/// Piecewise-linear path on an arbitrary interval [t_0, t_n] with strictly
/// increasing times. Used for intermediate objects (reparametrized pieces,
/// extensions) that do not live on [0, 1].
class Polyline {
 public:
  Polyline() = default;
  Polyline(std::vector<double> times, std::vector<double> values);

  std::span<const double> times() const noexcept { return t_; }
  std::span<const double> values() const noexcept { return y_; }
  std::size_t node_count() const noexcept { return t_.size(); }
  std::size_t segment_count() const noexcept { return t_.empty() ? 0 : t_.size() - 1; }
  double front_time() const { return t_.front(); }
  double back_time() const { return t_.back(); }

  /// Index i of the segment [t_i, t_{i+1}] holding t; the last segment owns t_n.
  std::size_t segment_index(double t) const;
  double slope(std::size_t segment) const;
  double eval(double t) const;
  /// Throws Error(AmbiguousPoint) when t is a node.
  double derivative(double t) const;
  /// Largest absolute slope.
  double lipschitz_constant() const;

 private:
  std::vector<double> t_;
  std::vector<double> y_;
};

/// Strictly increasing times with first node 0 and last node 1.
class Partition {
 public:
  explicit Partition(std::vector<double> nodes);
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  std::vector<double> nodes_;
};

class PLTrajectory {
 public:
  PLTrajectory(Partition partition, std::vector<double> values);
  /// Validates that the polyline spans exactly [0, 1].
  explicit PLTrajectory(Polyline path);

  const Polyline& path() const noexcept { return path_; }
  std::span<const double> times() const noexcept { return path_.times(); }
  std::span<const double> values() const noexcept { return path_.values(); }
  std::size_t node_count() const noexcept { return path_.node_count(); }
  std::size_t segment_count() const noexcept { return path_.segment_count(); }
  double slope(std::size_t segment) const { return path_.slope(segment); }
  double eval(double t) const;
  double derivative(double t) const;

 private:
  Polyline path_;
};

enum class AnalyticFamily { Sqrt, Power, Affine, Constant };

const char* to_string(AnalyticFamily family) noexcept;

/// Closed-form trajectory: sqrt (sqrt(t)), power (t^gamma, gamma > 0),
/// affine (intercept + slope * t) and constant.
class AnalyticTrajectory {
 public:
  static AnalyticTrajectory sqrt();
  static AnalyticTrajectory power(double gamma);
  static AnalyticTrajectory affine(double intercept, double slope);
  static AnalyticTrajectory constant(double value);

  AnalyticFamily family() const noexcept { return family_; }
  double gamma() const noexcept { return a_; }
  double intercept() const noexcept { return a_; }
  double slope() const noexcept { return b_; }
  double constant_value() const noexcept { return a_; }
  bool singular_at_zero() const noexcept;

  double eval(double t) const;
  double derivative(double t) const;

 private:
  AnalyticTrajectory(AnalyticFamily f, double a, double b) : family_(f), a_(a), b_(b) {}
  AnalyticFamily family_;
  double a_ = 0.0;
  double b_ = 0.0;
};

using Trajectory = std::variant<PLTrajectory, AnalyticTrajectory>;

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

struct RangeBounds {
  double alpha = 0.0;  // min of y over [0, 1]
  double beta = 0.0;   // max of y over [0, 1]
};

double eval(const Trajectory& y, double t);
double derivative(const Trajectory& y, double t);
RangeBounds range_bounds(const Trajectory& y);

/// p-th powers of the value and derivative parts of the W^{1,p} distance.
struct SobolevParts {
  double value_power = 0.0;       // integral of |y1 - y2|^p
  double derivative_power = 0.0;  // integral of |y1' - y2'|^p
  double distance(double p) const;
};

/// Exact for two piecewise-linear inputs (merged partition, split at sign
/// changes); adaptive quadrature otherwise. Throws Error(ToleranceNotMet)
/// carrying the best estimate when quadrature does not converge.
SobolevParts sobolev_parts(const Trajectory& y1, const Trajectory& y2, double p,
                           const QuadConfig& quad = {});
double sobolev_distance(const Trajectory& y1, const Trajectory& y2, double p = 1.0,
                        const QuadConfig& quad = {});

/// Exact integral of |d|^p over an interval of length len where d is linear
/// from d0 to d1.
double integrate_abs_linear_power(double d0, double d1, double len, double p);

/// Interpolant on the graded mesh t_k = (k/n)^grading, k = 0..n.
PLTrajectory discretize(const AnalyticTrajectory& y, std::size_t n, double grading = 1.0);

}  // namespace varigap
