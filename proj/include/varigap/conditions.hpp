#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "varigap/lagrangian.hpp"
#include "varigap/trajectory.hpp"

namespace varigap {

// Sampling-based checks of the structural conditions on L. A verdict of
// NoViolationFound only speaks for the grid named in `resolution`.

enum class VerdictStatus { NoViolationFound, Violation, InvalidInput };

const char* to_string(VerdictStatus s) noexcept;

enum class WitnessKind {
  ExceedsCap,   // finite value above cap
  Infinite,     // value is +inf
  SignFailure,  // rho- >= 0 or rho+ <= 0
  Error,        // evaluation error (only with InvalidInput)
};

const char* to_string(WitnessKind k) noexcept;

struct Witness {
  WitnessKind kind = WitnessKind::ExceedsCap;
  double y = 0.0;  // z for graph checks
  double v = 0.0;  // velocity at which L was evaluated (rho value for graph checks)
  double value = 0.0;
  std::optional<RhoSide> side;  // graph checks only
};

struct Resolution {
  std::size_t samples = 0;  // grid points (per axis for check_B)
  Interval range;           // z range, or y range for check_B
  std::optional<Interval> velocity_range;  // check_B only
  std::size_t refinement_points = 0;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::NoViolationFound;
  std::optional<Witness> witness;
  Resolution resolution;
  double sup_estimate = 0.0;  // largest finite value seen
  bool sup_infinite = false;  // some sample was +inf
  std::string message;
};

inline constexpr std::size_t kDefaultConditionSamples = 4097;
inline constexpr std::size_t kDefaultGridPerAxis = 257;
inline constexpr double kDefaultConditionCap = 1e12;

/// Signs rho- < 0 < rho+ and L(z, rho+-(z)) finite and <= cap on a uniform
/// grid over J, plus a refinement pass around the five largest values.
Verdict check_R(const Lagrangian& L, const RhoPair& rho, Interval J,
                std::size_t samples = kDefaultConditionSamples,
                double cap = kDefaultConditionCap);

/// check_R on J = [min y, max y].
Verdict check_Ry(const Lagrangian& L, const RhoPair& rho, const Trajectory& y,
                 std::size_t samples = kDefaultConditionSamples,
                 double cap = kDefaultConditionCap);

/// Boundedness of L on [-K, K] x [-r, r].
Verdict check_B(const Lagrangian& L, double K, double r,
                std::size_t samples_per_axis = kDefaultGridPerAxis,
                double cap = kDefaultConditionCap);

/// z -> L(z, 0) bounded on J; premise of the constant extension.
Verdict check_zero_speed(const Lagrangian& L, Interval J,
                         std::size_t samples = kDefaultConditionSamples,
                         double cap = kDefaultConditionCap);

/// Sampled bounds rho_min <= min(rho+, -rho-) and max(rho+, -rho-) <= rho_max
/// over J. Throws Error(ConditionSign) on a sign failure.
struct RhoBounds {
  double rho_min = 0.0;
  double rho_max = 0.0;
};

inline constexpr std::size_t kDefaultRhoSamples = 4096;

RhoBounds rho_bounds(const RhoPair& rho, Interval J, std::size_t samples = kDefaultRhoSamples);

/// Sampled sup over z in J of L(z, rho-(z)) and L(z, rho+(z)) (the larger of
/// the two), with the same refinement as check_R.
double rho_graph_sup(const Lagrangian& L, const RhoPair& rho, Interval J,
                     std::size_t samples = kDefaultRhoSamples);

/// Sampled sup over z in J of L(z, 0).
double zero_speed_sup(const Lagrangian& L, Interval J, std::size_t samples = kDefaultRhoSamples);

}  // namespace varigap
