#include <doctest.h>

#include <cmath>

#include "varigap/conditions.hpp"
#include "varigap/error.hpp"

using namespace varigap;

namespace {

const Lagrangian& gap() {
  static const Lagrangian L = Lagrangian::builtin("gap_example");
  return L;
}

// A violation must reproduce on direct evaluation.
void check_reproducible(const Lagrangian& L, const RhoPair* rho, const Verdict& v, double cap) {
  REQUIRE(v.status == VerdictStatus::Violation);
  REQUIRE(v.witness.has_value());
  const Witness& w = *v.witness;
  if (w.kind == WitnessKind::SignFailure) {
    REQUIRE(rho != nullptr);
    REQUIRE(w.side.has_value());
    const double r = rho->eval_unchecked(*w.side, w.y);
    CHECK((*w.side == RhoSide::Plus ? r <= 0.0 : r >= 0.0));
    return;
  }
  double vel = w.v;
  if (rho != nullptr && w.side) vel = rho->eval(*w.side, w.y);
  const ExtendedValue x = eval_L(L, w.y, vel);
  if (w.kind == WitnessKind::Infinite) {
    CHECK(x.is_infinite());
  } else {
    CHECK(x.to_double() > cap);
  }
}

}  // namespace

TEST_CASE("check_R examples") {
  const RhoPair unit = RhoPair::constant(-1, 1);
  const Verdict q = check_R(Lagrangian::builtin("quadratic"), unit, {-10, 10});
  CHECK(q.status == VerdictStatus::NoViolationFound);
  CHECK(q.sup_estimate == 1.0);
  CHECK(q.resolution.samples == kDefaultConditionSamples);

  const Verdict g = check_R(gap(), unit, {-1, 1});
  check_reproducible(gap(), &unit, g, kDefaultConditionCap);
  CHECK(std::abs(g.witness->y) < 0.01);
  CHECK(gap().eval_double(0.01, 1) == doctest::Approx(6.245001e6).epsilon(1e-6));

  const RhoPair lin("-1", "z");
  const Verdict s = check_R(Lagrangian::builtin("quadratic"), lin, {-1, 1});
  check_reproducible(Lagrangian::builtin("quadratic"), &lin, s, kDefaultConditionCap);
  CHECK(s.witness->kind == WitnessKind::SignFailure);
  CHECK(s.witness->y <= 0.0);
}

TEST_CASE("check_Ry examples") {
  const RhoPair unit = RhoPair::constant(-1, 1);
  const Trajectory y{discretize(AnalyticTrajectory::power(2.0 / 3.0), 64, 1.0)};
  CHECK(check_Ry(Lagrangian::builtin("quadratic"), unit, y).status ==
        VerdictStatus::NoViolationFound);
  const Verdict g = check_Ry(gap(), unit, Trajectory{AnalyticTrajectory::sqrt()});
  check_reproducible(gap(), &unit, g, kDefaultConditionCap);
  CHECK(g.witness->y < 0.01);

  const RhoPair half("-1/(2*z + 1)", "1/(2*z)");
  const Verdict c = check_Ry(gap(), half, Trajectory{AnalyticTrajectory::constant(0.5)});
  CHECK(c.status == VerdictStatus::NoViolationFound);
  CHECK(c.sup_estimate == doctest::Approx(0.25 * (0.25 - 1.0) * (0.25 - 1.0)));
}

TEST_CASE("check_B examples") {
  const Verdict q = check_B(Lagrangian::builtin("quadratic"), 10, 5);
  CHECK(q.status == VerdictStatus::NoViolationFound);
  CHECK(q.sup_estimate == 25.0);
  const Verdict g = check_B(gap(), 1, 1);
  check_reproducible(gap(), nullptr, g, kDefaultConditionCap);
  CHECK(std::abs(g.witness->y) < 0.01);
  const Verdict z = check_B(Lagrangian::parse("0"), 3, 2);
  CHECK(z.status == VerdictStatus::NoViolationFound);
  CHECK(z.sup_estimate == 0.0);
  CHECK_THROWS_AS(check_B(gap(), 0, 1), Error);
}

TEST_CASE("check_zero_speed examples") {
  const Verdict q = check_zero_speed(Lagrangian::builtin("quadratic"), {-1, 1});
  CHECK(q.status == VerdictStatus::NoViolationFound);
  CHECK(q.sup_estimate == 0.0);
  const Verdict g = check_zero_speed(gap(), {0, 1});
  CHECK(g.status == VerdictStatus::NoViolationFound);
  CHECK(g.sup_estimate == 1.0);
  const Lagrangian inv = Lagrangian::parse("1/v^2");
  const Verdict i = check_zero_speed(inv, {-2, 3});
  check_reproducible(inv, nullptr, i, kDefaultConditionCap);
  CHECK(i.witness->kind == WitnessKind::Infinite);
}

TEST_CASE("evaluation errors give invalid input") {
  const Verdict v = check_zero_speed(Lagrangian::parse("v/v"), {0, 1});
  CHECK(v.status == VerdictStatus::InvalidInput);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->kind == WitnessKind::Error);
  CHECK_FALSE(v.message.empty());
}

TEST_CASE("doubling samples never hides a violation") {
  const RhoPair unit = RhoPair::constant(-1, 1);
  for (std::size_t n = 129; n <= 8193; n = 2 * n - 1) {
    CHECK(check_R(gap(), unit, {-1, 1}, n).status == VerdictStatus::Violation);
    CHECK(check_B(gap(), 1, 1, n > 1025 ? 1025 : n).status == VerdictStatus::Violation);
  }
}

TEST_CASE("B implies R on the builtin corpus") {
  for (const std::string& name : Lagrangian::builtin_names()) {
    const Lagrangian L = Lagrangian::builtin(name);
    for (double K : {0.5, 1.0, 2.0}) {
      const double r = 2.0;
      if (check_B(L, K, r).status != VerdictStatus::NoViolationFound) continue;
      CHECK_MESSAGE(check_R(L, RhoPair::constant(-r / 2, r / 2), {-K, K}).status ==
                        VerdictStatus::NoViolationFound,
                    name);
    }
  }
}

TEST_CASE("rho bounds and graph suprema") {
  const RhoBounds b = rho_bounds(RhoPair("-2", "1 + z^2"), {0, 2});
  CHECK(b.rho_min == 1.0);
  CHECK(b.rho_max == 5.0);
  CHECK_THROWS_AS(rho_bounds(RhoPair("-1", "z"), {-1, 1}), Error);
  CHECK(rho_graph_sup(Lagrangian::builtin("quadratic"), RhoPair::constant(-3, 2), {0, 1}) == 9.0);
  CHECK(zero_speed_sup(gap(), {0, 1}) == 1.0);
}
