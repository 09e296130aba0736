#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "varigap/conditions.hpp"
#include "varigap/functional.hpp"
#include "varigap/lagrangian.hpp"
#include "varigap/repair.hpp"
#include "varigap/trajectory.hpp"

// JSON, CSV and SVG formats. Infinite values serialize as the string "inf".
// Malformed input raises Error(Parse) with the byte offset (1-based) when
// the JSON reader reports one.

namespace varigap::io {

Lagrangian lagrangian_from_json(std::string_view text);
RhoPair rho_from_json(std::string_view text);
Trajectory trajectory_from_json(std::string_view text);

std::string to_json(const Trajectory& y);
std::string to_json(const EnergyResult& r);
std::string to_json(const GapCertificate& c);
std::string to_json(const DivergenceReport& r);
std::string to_json(const Verdict& v);
std::string to_json(const RepairReport& r);
std::string to_json(const std::vector<RepairReport>& reports);

std::string to_csv(const EnergyResult& r);
/// Columns: k, c_k, bound.
std::string to_csv(const GapCertificate& c);
/// Columns: M, bad_measure, T, m, dist_W1p, F_y, F_w, Q2, Q3.
std::string to_csv(const std::vector<RepairReport>& reports);
std::string to_csv(const Verdict& v);

/// Log-scale polyline of the positive bounds against k.
std::string to_svg(const GapCertificate& c);

/// Shortest round-trip decimal form; "inf" for +inf.
std::string format_number(double x);

}  // namespace varigap::io
