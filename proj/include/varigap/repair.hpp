#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varigap/conditions.hpp"
#include "varigap/functional.hpp"
#include "varigap/lagrangian.hpp"
#include "varigap/quadrature.hpp"
#include "varigap/trajectory.hpp"

namespace varigap {

/// u equals y off the bad set and is affine on each bad interval.
struct LusinSplit {
  PLTrajectory u;
  std::vector<Interval> bad_set;  // disjoint, increasing
  std::vector<char> bad_segment;  // per segment of u; each bad interval is one segment
  double bad_measure = 0.0;       // |A|
  double u_variation = 0.0;       // integral over A of |u'|
  double y_variation = 0.0;       // integral over A of |y'|
  std::size_t fix_splits = 0;     // bad runs whose chord was flat and got split
  double max_bad_slope = 0.0;     // largest |u'| on A
};

/// Bad set = maximal runs of segments with |slope| > M. A flat chord over a
/// nonconstant run is split at the interior node closest to the run midpoint
/// with y != y(run start).
LusinSplit lusin_split(const PLTrajectory& y, double M);

/// Monotone piecewise-linear realization of phi with phi(0) = 0, phi' = 1 off
/// the bad set and phi' = |u'| / rho_h on it.
struct Reparam {
  std::vector<double> tau;   // breakpoints in [0, 1]
  std::vector<double> phi;   // phi(tau_i), strictly increasing
  std::vector<char> bad;     // per piece [tau_i, tau_{i+1}]
  double T = 1.0;            // phi(1)
  double bad_image_measure = 0.0;
  bool depth_limited = false;  // some bad piece hit the subdivision limit

  double phi_at(double t) const;
  /// Exact inverse of the piecewise-linear phi on [0, T].
  double psi_at(double s) const;
  std::size_t piece_index_phi(double s) const;
};

inline constexpr double kReparamQuadTol = 1e-10;
inline constexpr double kReparamMidpointTol = 1e-4;
inline constexpr int kReparamMaxDepth = 30;

Reparam build_reparam(const LusinSplit& split, const RhoPair& rho, const RhoBounds& bounds);

/// v = u o psi as a polyline on [0, min(T, 1)], nodes (phi_i, u(tau_i)).
Polyline compose_v(const LusinSplit& split, const Reparam& rep);

enum class ExtensionMode { Ode, Constant };

const char* to_string(ExtensionMode m) noexcept;

struct Extension {
  Polyline w;                // on [0, 1]
  int m = 0;                 // number of switches between rho+ and rho- legs
  std::vector<double> tau;   // T, switch times, 1
};

inline constexpr double kEventTol = 1e-12;

/// Continues v from T to 1. Ode mode follows z' = rho+(z) up to beta, then
/// z' = rho-(z) down to alpha, and so on, with classical RK4 and bisection
/// on the event. Constant mode holds v(T).
Extension extend(const Polyline& v, const RhoPair& rho, const RhoBounds& bounds,
                 RangeBounds range, ExtensionMode mode);

struct RepairOptions {
  double p = 1.0;
  double threshold = 1.0;  // slope cutoff M
  QuadConfig quad;
  ExtensionMode mode = ExtensionMode::Ode;
  std::size_t condition_samples = kDefaultConditionSamples;
  std::size_t rho_samples = kDefaultRhoSamples;
};

struct RepairCheck {
  std::string name;
  bool ok = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct RepairReport {
  double threshold = 0.0;
  double p = 1.0;
  ExtensionMode mode = ExtensionMode::Ode;
  double T = 1.0;
  double bad_measure = 0.0;
  double bad_image_measure = 0.0;
  double u_variation = 0.0;
  int m = 0;
  std::vector<double> tau;
  double lip_constant = 0.0;
  double sobolev_distance = 0.0;
  double derivative_distance_power = 0.0;
  RangeBounds range;
  RhoBounds rho;
  double graph_sup = 0.0;  // sampled sup of L on the rho graphs over the range
  EnergyResult energy_y;
  EnergyResult energy_w;
  double P1 = 0.0, P2 = 0.0, P3 = 0.0;  // derivative distance power: good, bad image, tail
  double Q1 = 0.0, Q2 = 0.0, Q3 = 0.0;  // energy of w on the same three parts
  double Q2_bound = 0.0;
  double Q3_bound = 0.0;
  std::vector<RepairCheck> checks;
  bool all_ok = true;
  Polyline w;  // on [0, 1]
};

/// Full pipeline. Requires y(0) = 0, finite energy and condition R_y for
/// rho (Error(ConditionViolated) otherwise; constant mode also needs the
/// zero-speed bound).
RepairReport repair(const PLTrajectory& y, const Lagrangian& L, const RhoPair& rho,
                    const RepairOptions& options);

/// One report per threshold; thresholds must increase strictly.
std::vector<RepairReport> sweep(const PLTrajectory& y, const Lagrangian& L, const RhoPair& rho,
                                const std::vector<double>& thresholds, RepairOptions options);

/// Doubles M from `start` until F(w) <= F(y) + eps. Returns the reports of
/// the whole sequence; the last one satisfies the bound unless `max_steps`
/// ran out.
std::vector<RepairReport> approach_energy(const PLTrajectory& y, const Lagrangian& L,
                                          const RhoPair& rho, double eps, double start,
                                          int max_steps, RepairOptions options);

}  // namespace varigap
