#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "varigap/extreal.hpp"
#include "varigap/lagrangian.hpp"
#include "varigap/quadrature.hpp"
#include "varigap/trajectory.hpp"

namespace varigap {

enum class EnergyStatus { Converged, Diverged, Capped, SingularEndpointLimit };

const char* to_string(EnergyStatus status) noexcept;

struct EnergyResult {
  ExtendedValue value;
  EnergyStatus status = EnergyStatus::Converged;
  double lower_bound = 0.0;  // F(y) >= lower_bound in every status
  std::size_t segments_evaluated = 0;

  bool converged() const noexcept { return status == EnergyStatus::Converged; }
};

/// Integral of L along one straight piece t -> (y0 + slope (t - t0), slope)
/// over [t0, t1]. Endpoints where the path crosses y = 0 are refined
/// geometrically; constant pieces are integrated exactly.
EnergyResult segment_energy(const Lagrangian& L, double t0, double t1, double y0, double slope,
                            const QuadConfig& quad, double offset = 0.0);

/// F(y) = integral over [0, 1] of L(y(t), y'(t)). Segments are reduced left
/// to right; any +inf sample on a piece of positive length reports Diverged,
/// partial sums above quad.cap report Capped. In both cases value is +inf.
EnergyResult energy(const Lagrangian& L, const Trajectory& y, const QuadConfig& quad = {});

// ---------------------------------------------------------------------------
// Divergence certificate for the gap Lagrangian.

enum class CertificateVerdict { Divergent, Inconclusive };

const char* to_string(CertificateVerdict v) noexcept;

struct GapCertificate {
  double a = 0.0;          // last zero before the trajectory departs from 0
  double b = 0.0;          // end of the comparison interval, y != 0 on (a, b]
  double d = 0.0;          // |y| <= 1/(4 |y'|_inf) and |y| increasing on (a, d]
  double lipschitz = 0.0;  // |y'|_inf
  double threshold = 0.0;  // 1 / (4 |y'|_inf)
  // -1/2 |y'|^2 int_d^b y'^2/y^2 + 1/16 int_d^b y'^2/y^4
  double fixed_terms = 0.0;
  std::vector<double> c_sequence;  // c_k = a + (d - a) 2^-k, k = 1..K
  std::vector<double> bounds;      // lower bounds on F(y), one per c_k
  CertificateVerdict verdict = CertificateVerdict::Inconclusive;
};

inline constexpr int kDefaultCertificateTerms = 30;

/// Lower-bound chain proving F(y) = +inf for the gap Lagrangian and a
/// Lipschitz y with y(0) = 0 that is not identically 0. For each c_k the
/// bound is fixed_terms + (1/32) (1/(d - c_k)) (1/y(c_k) - 1/y(d))^2.
/// Verdict is Divergent iff the bounds increase strictly and the last one
/// exceeds quad.cap / 10.
GapCertificate gap_certificate(const PLTrajectory& y, const QuadConfig& quad = {},
                               int terms = kDefaultCertificateTerms);

struct DivergenceReport {
  EnergyResult energy;
  GapCertificate certificate;
  bool consistent = false;  // both detectors agree that F(y) = +inf
  std::string message;
};

/// Runs energy() and gap_certificate() side by side. Precondition: L is the
/// gap_example builtin and y is admissible (y(0) = 0, not identically 0).
DivergenceReport verify_divergence_consistency(const PLTrajectory& y, const Lagrangian& L,
                                               const QuadConfig& quad = {});

}  // namespace varigap
