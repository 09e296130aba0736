#include "varigap/repair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "varigap/error.hpp"

namespace varigap {

const char* to_string(ExtensionMode m) noexcept {
  return m == ExtensionMode::Constant ? "constant" : "ode";
}

// ---------------------------------------------------------------------------
// Lusin step

LusinSplit lusin_split(const PLTrajectory& y, double M) {
  if (!(M > 0.0) || !std::isfinite(M))
    throw Error(ErrorCode::InvalidArgument, "slope threshold M must be positive and finite");
  const auto t = y.times();
  const auto v = y.values();
  const std::size_t n = t.size();

  std::vector<double> ut{t[0]}, uv{v[0]};
  std::vector<char> bad_seg;
  LusinSplit out{y, {}, {}, 0.0, 0.0, 0.0, 0, 0.0};

  auto push_bad = [&](std::size_t i, std::size_t j) {
    ut.push_back(t[j]);
    uv.push_back(v[j]);
    bad_seg.push_back(1);
    out.bad_set.push_back({t[i], t[j]});
    out.bad_measure += t[j] - t[i];
    out.u_variation += std::abs(v[j] - v[i]);
    out.max_bad_slope = std::max(out.max_bad_slope, std::abs((v[j] - v[i]) / (t[j] - t[i])));
  };

  std::size_t i = 0;
  while (i + 1 < n) {
    if (!(std::abs(y.slope(i)) > M)) {
      ut.push_back(t[i + 1]);
      uv.push_back(v[i + 1]);
      bad_seg.push_back(0);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && std::abs(y.slope(j)) > M) {
      out.y_variation += std::abs(v[j + 1] - v[j]);
      ++j;
    }
    if (v[i] != v[j]) {
      push_bad(i, j);
    } else {
      // Flat chord over a nonconstant run: split at the interior node closest
      // to the run midpoint whose value differs from the run start.
      const double mid = 0.5 * (t[i] + t[j]);
      std::size_t best = i;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (v[k] == v[i]) continue;
        if (best == i || std::abs(t[k] - mid) < std::abs(t[best] - mid)) best = k;
      }
      if (best == i) throw Error(ErrorCode::Internal, "lusin split: no node for the chord fix");
      push_bad(i, best);
      push_bad(best, j);
      ++out.fix_splits;
    }
    i = j;
  }
  out.u = PLTrajectory(Polyline(std::move(ut), std::move(uv)));
  out.bad_segment = std::move(bad_seg);
  return out;
}

// ---------------------------------------------------------------------------
// Reparametrization

std::size_t Reparam::piece_index_phi(double s) const {
  const auto it = std::upper_bound(phi.begin(), phi.end(), s);
  std::size_t k = it == phi.begin() ? 0 : static_cast<std::size_t>(it - phi.begin()) - 1;
  return std::min(k, phi.size() - 2);
}

double Reparam::phi_at(double t) const {
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::Domain, "phi is defined on [0, 1]");
  const auto it = std::upper_bound(tau.begin(), tau.end(), t);
  std::size_t k = it == tau.begin() ? 0 : static_cast<std::size_t>(it - tau.begin()) - 1;
  k = std::min(k, tau.size() - 2);
  if (t == tau[k]) return phi[k];
  return phi[k] + (t - tau[k]) * (phi[k + 1] - phi[k]) / (tau[k + 1] - tau[k]);
}

double Reparam::psi_at(double s) const {
  if (s < 0.0 || s > T) throw Error(ErrorCode::Domain, "psi is defined on [0, T]");
  const std::size_t k = piece_index_phi(s);
  if (s == phi[k]) return tau[k];
  if (s == phi[k + 1]) return tau[k + 1];
  return tau[k] + (s - phi[k]) * (tau[k + 1] - tau[k]) / (phi[k + 1] - phi[k]);
}

Reparam build_reparam(const LusinSplit& split, const RhoPair& rho, const RhoBounds& bounds) {
  if (!(bounds.rho_min > 0.0)) throw Error(ErrorCode::Precondition, "rho_min must be positive");
  const auto ut = split.u.times();
  const auto uv = split.u.values();
  Reparam rep;
  rep.tau.push_back(0.0);
  rep.phi.push_back(0.0);

  for (std::size_t i = 0; i + 1 < ut.size(); ++i) {
    const double a = ut[i], b = ut[i + 1];
    if (!split.bad_segment[i]) {
      rep.tau.push_back(b);
      rep.phi.push_back(rep.phi.back() + (b - a));
      rep.bad.push_back(0);
      continue;
    }
    const double s = split.u.slope(i);
    if (s == 0.0) throw Error(ErrorCode::Precondition, "u' vanishes on a bad interval");
    const RhoSide side = s > 0.0 ? RhoSide::Plus : RhoSide::Minus;
    const double sign = s > 0.0 ? 1.0 : -1.0;
    auto g = [&](double tt) {
      const double z = uv[i] + s * (tt - a);
      return std::abs(s) / (sign * rho.eval(side, z));
    };
    struct Item {
      double a, b;
      int depth;
    };
    std::vector<Item> stack{{a, b, 0}};
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      const double m = 0.5 * (it.a + it.b);
      const double whole = quad_detail::gauss_kronrod15(g, it.a, it.b).kronrod;
      const double left = quad_detail::gauss_kronrod15(g, it.a, m).kronrod;
      const double right = quad_detail::gauss_kronrod15(g, m, it.b).kronrod;
      const double sum = left + right;
      const bool ok = std::abs(sum - whole) <= kReparamQuadTol * (it.b - it.a) &&
                      std::abs(left - 0.5 * sum) <= kReparamMidpointTol * sum;
      const bool splittable = m > it.a && m < it.b;
      if (ok || it.depth >= kReparamMaxDepth || !splittable) {
        if (!ok) rep.depth_limited = true;
        if (!(sum > 0.0) || !std::isfinite(sum))
          throw Error(ErrorCode::Internal, "phi' is not positive on a bad piece");
        rep.tau.push_back(it.b);
        rep.phi.push_back(rep.phi.back() + sum);
        rep.bad.push_back(1);
        rep.bad_image_measure += sum;
        continue;
      }
      stack.push_back({m, it.b, it.depth + 1});
      stack.push_back({it.a, m, it.depth + 1});
    }
  }
  for (std::size_t k = 0; k + 1 < rep.phi.size(); ++k) {
    if (!(rep.phi[k + 1] > rep.phi[k]))
      throw Error(ErrorCode::Internal, "phi is not strictly increasing");
  }
  rep.T = rep.phi.back();
  return rep;
}

Polyline compose_v(const LusinSplit& split, const Reparam& rep) {
  const double end = std::min(rep.T, 1.0);
  std::vector<double> times, values;
  for (std::size_t k = 0; k < rep.phi.size() && rep.phi[k] < end; ++k) {
    times.push_back(rep.phi[k]);
    values.push_back(split.u.eval(rep.tau[k]));
  }
  times.push_back(end);
  values.push_back(split.u.eval(rep.psi_at(end)));
  return Polyline(std::move(times), std::move(values));
}

// ---------------------------------------------------------------------------
// Extension on [T, 1]

Extension extend(const Polyline& v, const RhoPair& rho, const RhoBounds& bounds,
                 RangeBounds range, ExtensionMode mode) {
  const double T = v.back_time();
  if (!(T < 1.0)) throw Error(ErrorCode::Precondition, "extension needs T < 1");
  const double alpha = range.alpha, beta = range.beta;
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(alpha), std::abs(beta)));
  double z = v.values().back();
  if (z < alpha - slack || z > beta + slack)
    throw Error(ErrorCode::Precondition, "v(T) lies outside [alpha, beta]");
  z = std::clamp(z, alpha, beta);

  std::vector<double> times(v.times().begin(), v.times().end());
  std::vector<double> values(v.values().begin(), v.values().end());
  values.back() = z;
  Extension ext;
  ext.tau.push_back(T);

  if (mode == ExtensionMode::Constant || !(beta > alpha)) {
    times.push_back(1.0);
    values.push_back(z);
    ext.tau.push_back(1.0);
    ext.w = Polyline(std::move(times), std::move(values));
    return ext;
  }

  const double h_max = std::min(1e-3, (beta - alpha) / (10.0 * bounds.rho_max));
  RhoSide side = z >= beta ? RhoSide::Minus : RhoSide::Plus;
  auto field = [&](double x) { return rho.eval(side, std::clamp(x, alpha, beta)); };
  auto rk4 = [&](double x, double h) {
    const double k1 = field(x);
    const double k2 = field(x + 0.5 * h * k1);
    const double k3 = field(x + 0.5 * h * k2);
    const double k4 = field(x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  auto crossed = [&](double x) { return side == RhoSide::Plus ? x >= beta : x <= alpha; };

  double t = T;
  while (t < 1.0) {
    const bool last = t + h_max >= 1.0;
    const double h = last ? 1.0 - t : h_max;
    const double z1 = rk4(z, h);
    if (!crossed(z1)) {
      t = last ? 1.0 : t + h;
      z = z1;
      times.push_back(t);
      values.push_back(z);
      continue;
    }
    double lo = 0.0, hi = h;
    while (hi - lo > kEventTol) {
      const double mid = 0.5 * (lo + hi);
      if (crossed(rk4(z, mid))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double target = side == RhoSide::Plus ? beta : alpha;
    const double te = last && hi == h ? 1.0 : t + hi;
    if (!(te > t)) throw Error(ErrorCode::Internal, "stiff field: event step collapsed");
    times.push_back(te);
    values.push_back(target);
    t = te;
    z = target;
    if (te < 1.0) {
      ext.tau.push_back(te);
      ++ext.m;
      side = side == RhoSide::Plus ? RhoSide::Minus : RhoSide::Plus;
    }
  }
  ext.tau.push_back(1.0);
  ext.w = Polyline(std::move(times), std::move(values));
  return ext;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

constexpr double kBoundSlack = 1e-3;  // relative slack of the sampled Q bounds

void add_check(RepairReport& r, std::string name, double lhs, double rhs) {
  const bool ok = lhs <= rhs;
  r.checks.push_back({std::move(name), ok, lhs, rhs});
  if (!ok) r.all_ok = false;
}

}  // namespace

RepairReport repair(const PLTrajectory& y, const Lagrangian& L, const RhoPair& rho,
                    const RepairOptions& options) {
  if (!(options.p >= 1.0) || !std::isfinite(options.p))
    throw Error(ErrorCode::InvalidArgument, "p must be finite and >= 1");
  options.quad.validate();
  if (y.values()[0] != 0.0) throw Error(ErrorCode::Precondition, "repair requires y(0) = 0");

  RepairReport r;
  r.threshold = options.threshold;
  r.p = options.p;
  r.mode = options.mode;
  r.range = range_bounds(Trajectory{y});
  const Interval J{r.range.alpha, r.range.beta};

  const Verdict ry = check_Ry(L, rho, Trajectory{y}, options.condition_samples, options.quad.cap);
  if (ry.status != VerdictStatus::NoViolationFound) {
    throw Error(ErrorCode::ConditionViolated, "condition R_y rejected: " + ry.message);
  }
  double zero_sup = 0.0;
  if (options.mode == ExtensionMode::Constant) {
    const Verdict zs = check_zero_speed(L, J, options.condition_samples, options.quad.cap);
    if (zs.status != VerdictStatus::NoViolationFound)
      throw Error(ErrorCode::ConditionViolated, "zero-speed bound rejected: " + zs.message);
    zero_sup = zs.sup_estimate;
  }
  r.energy_y = energy(L, Trajectory{y}, options.quad);
  if (!r.energy_y.converged()) {
    throw Error(ErrorCode::Precondition, std::string("repair requires finite energy, got status ") +
                                             to_string(r.energy_y.status));
  }

  r.rho = rho_bounds(rho, J, options.rho_samples);
  r.graph_sup = rho_graph_sup(L, rho, J, options.rho_samples);

  const LusinSplit split = lusin_split(y, options.threshold);
  const Reparam rep = build_reparam(split, rho, r.rho);
  const Polyline v = compose_v(split, rep);
  r.T = rep.T;
  r.bad_measure = split.bad_measure;
  r.bad_image_measure = rep.bad_image_measure;
  r.u_variation = split.u_variation;

  if (rep.T >= 1.0) {
    r.w = v;
  } else {
    Extension ext = extend(v, rho, r.rho, r.range, options.mode);
    r.w = std::move(ext.w);
    r.m = ext.m;
    r.tau = std::move(ext.tau);
  }
  const PLTrajectory w(r.w);
  const double end = std::min(rep.T, 1.0);
  auto part_of = [&](double mid) {
    if (mid >= end) return 3;
    return rep.bad[rep.piece_index_phi(mid)] ? 2 : 1;
  };

  const SobolevParts parts = sobolev_parts(Trajectory{w}, Trajectory{y}, options.p, options.quad);
  r.sobolev_distance = parts.distance(options.p);
  r.derivative_distance_power = parts.derivative_power;
  r.lip_constant = w.path().lipschitz_constant();

  // P terms on the merged partition of w and y.
  {
    std::vector<double> nodes(w.times().begin(), w.times().end());
    nodes.insert(nodes.end(), y.times().begin(), y.times().end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double mid = 0.5 * (nodes[k] + nodes[k + 1]);
      const double ds = w.slope(w.path().segment_index(mid)) - y.slope(y.path().segment_index(mid));
      const double c = (nodes[k + 1] - nodes[k]) * std::pow(std::abs(ds), options.p);
      switch (part_of(mid)) {
        case 1: r.P1 += c; break;
        case 2: r.P2 += c; break;
        default: r.P3 += c; break;
      }
    }
  }

  r.energy_w = energy(L, Trajectory{w}, options.quad);
  // Q terms: every segment of w lies in exactly one of the three parts.
  {
    const auto wt = w.times();
    const auto wv = w.values();
    for (std::size_t k = 0; k + 1 < wt.size(); ++k) {
      const EnergyResult e =
          segment_energy(L, wt[k], wt[k + 1], wv[k], w.slope(k), options.quad);
      const double c = e.value.to_double();
      switch (part_of(0.5 * (wt[k] + wt[k + 1]))) {
        case 1: r.Q1 += c; break;
        case 2: r.Q2 += c; break;
        default: r.Q3 += c; break;
      }
    }
  }
  r.Q2_bound = r.graph_sup * split.u_variation / r.rho.rho_min;
  if (rep.T < 1.0) {
    r.Q3_bound = (options.mode == ExtensionMode::Constant ? zero_sup : r.graph_sup) * (1.0 - rep.T);
  }

  // Invariants.
  add_check(r, "w(0) = y(0)", std::abs(w.values()[0] - y.values()[0]), 0.0);
  {
    double worst = 0.0;
    for (std::size_t k = 0; k < rep.tau.size(); ++k)
      worst = std::max(worst, std::abs(rep.psi_at(rep.phi[k]) - rep.tau[k]));
    add_check(r, "psi o phi = id at breakpoints", worst, 1e-12);
  }
  {
    double worst = 0.0;
    const auto vt = v.times();
    for (std::size_t k = 0; k + 1 < vt.size(); ++k) {
      if (part_of(0.5 * (vt[k] + vt[k + 1])) == 2) worst = std::max(worst, std::abs(v.slope(k)));
    }
    add_check(r, "|v'| <= rho_max on the bad image", worst, r.rho.rho_max + 1e-12);
  }
  {
    double l1 = 0.0, sup = 0.0;
    for (std::size_t k = 0; k + 1 < rep.tau.size(); ++k)
      l1 += std::abs((rep.phi[k + 1] - rep.phi[k]) - (rep.tau[k + 1] - rep.tau[k]));
    for (std::size_t k = 0; k < rep.tau.size(); ++k)
      sup = std::max(sup, std::abs(rep.phi[k] - rep.tau[k]));
    const double rhs = rep.bad_image_measure + split.bad_measure + 1e-10;
    add_check(r, "integral |phi' - 1| <= |phi(A)| + |A|", l1, rhs);
    add_check(r, "sup |phi - id| <= |phi(A)| + |A|", sup, rhs);
  }
  add_check(r, "integral_A |u'| <= integral_A |y'|", split.u_variation,
            split.y_variation * (1.0 + 1e-12));
  add_check(r, "|phi(A)| <= integral_A |u'| / rho_min", rep.bad_image_measure,
            split.u_variation / r.rho.rho_min * (1.0 + 1e-9) + 1e-15);
  add_check(r, "Lip(w) <= max(M, rho_max)", r.lip_constant,
            std::max(options.threshold, r.rho.rho_max) * (1.0 + 1e-6) + 1e-12);
  if (rep.T < 1.0 && options.mode == ExtensionMode::Ode) {
    const double width = r.range.beta - r.range.alpha;
    const double bound =
        width > 0.0 ? r.rho.rho_max / width * (1.0 - rep.T) + 1.0 : 1.0;
    add_check(r, "m <= rho_max (1 - T) / (beta - alpha) + 1", r.m, bound);
  }
  add_check(r, "P1 + P2 + P3 = derivative distance power",
            std::abs(r.P1 + r.P2 + r.P3 - parts.derivative_power),
            1e-9 * std::max(1.0, parts.derivative_power));
  add_check(r, "Q2 <= sup L on rho graphs * integral_A |u'| / rho_min", r.Q2,
            r.Q2_bound * (1.0 + kBoundSlack) + 1e-12);
  add_check(r, "Q3 <= sup L * (1 - T)", r.Q3, r.Q3_bound * (1.0 + kBoundSlack) + 1e-12);
  return r;
}

std::vector<RepairReport> sweep(const PLTrajectory& y, const Lagrangian& L, const RhoPair& rho,
                                const std::vector<double>& thresholds, RepairOptions options) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidArgument, "empty threshold sweep");
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    if (!(thresholds[k] > thresholds[k - 1]))
      throw Error(ErrorCode::InvalidArgument, "sweep thresholds must increase strictly");
  }
  std::vector<RepairReport> out;
  out.reserve(thresholds.size());
  for (const double M : thresholds) {
    options.threshold = M;
    out.push_back(repair(y, L, rho, options));
  }
  return out;
}

std::vector<RepairReport> approach_energy(const PLTrajectory& y, const Lagrangian& L,
                                          const RhoPair& rho, double eps, double start,
                                          int max_steps, RepairOptions options) {
  if (!(eps > 0.0) || !(start > 0.0) || max_steps < 1)
    throw Error(ErrorCode::InvalidArgument, "approach_energy needs eps > 0, start > 0, steps >= 1");
  std::vector<RepairReport> out;
  double M = start;
  for (int k = 0; k < max_steps; ++k) {
    options.threshold = M;
    out.push_back(repair(y, L, rho, options));
    const RepairReport& r = out.back();
    if (r.energy_w.value.to_double() <= r.energy_y.value.to_double() + eps) break;
    M *= 2.0;
  }
  return out;
}

}  // namespace varigap
