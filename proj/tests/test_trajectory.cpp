#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "varigap/error.hpp"
#include "varigap/trajectory.hpp"

using namespace varigap;

namespace {

PLTrajectory pl(std::vector<double> t, std::vector<double> y) {
  return PLTrajectory(Partition(std::move(t)), std::move(y));
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

// Midpoint sums of |y1 - y2| and |y1' - y2'| on a fine uniform grid.
double riemann_w11(const oracle::PL& a, const oracle::PL& b, long n) {
  auto at = [](const oracle::PL& p, double s, double& val, double& slope) {
    std::size_t k = 0;
    while (k + 2 < p.t.size() && s >= p.t[k + 1]) ++k;
    slope = (p.y[k + 1] - p.y[k]) / (p.t[k + 1] - p.t[k]);
    val = p.y[k] + slope * (s - p.t[k]);
  };
  double v = 0.0, d = 0.0;
  for (long i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    double va, sa, vb, sb;
    at(a, s, va, sa);
    at(b, s, vb, sb);
    v += std::abs(va - vb);
    d += std::abs(sa - sb);
  }
  return (v + d) / n;
}

}  // namespace

TEST_CASE("eval: interpolation and closed forms") {
  CHECK(eval(Trajectory{pl({0, 1}, {0, 1})}, 0.25) == doctest::Approx(0.25));
  CHECK(eval(Trajectory{AnalyticTrajectory::sqrt()}, 0.25) == 0.5);
  CHECK(eval(Trajectory{pl({0, 0.5, 1}, {0, 1, 1})}, 0.75) == 1.0);
  CHECK(code_of([] { eval(Trajectory{AnalyticTrajectory::sqrt()}, 1.5); }) == ErrorCode::Domain);
  CHECK(code_of([] { eval(Trajectory{pl({0, 1}, {0, 1})}, -0.1); }) == ErrorCode::Domain);
}

TEST_CASE("derivative: slopes, closed forms and error cases") {
  CHECK(derivative(Trajectory{AnalyticTrajectory::sqrt()}, 0.25) == 1.0);
  const PLTrajectory y = pl({0, 0.5, 1}, {0, 1, 1});
  CHECK(derivative(Trajectory{y}, 0.25) == 2.0);
  CHECK(derivative(Trajectory{AnalyticTrajectory::constant(0.3)}, 0.7) == 0.0);
  CHECK(code_of([&] { derivative(Trajectory{y}, 0.5); }) == ErrorCode::AmbiguousPoint);
  CHECK(code_of([] { derivative(Trajectory{AnalyticTrajectory::sqrt()}, 0.0); }) ==
        ErrorCode::SingularEndpoint);
  CHECK(derivative(Trajectory{AnalyticTrajectory::power(2.0)}, 0.0) == 0.0);
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition({0.0}), Error);
  CHECK_THROWS_AS(Partition({0.1, 1.0}), Error);
  CHECK_THROWS_AS(Partition({0.0, 0.9}), Error);
  CHECK_THROWS_AS(Partition({0.0, 0.5, 0.5, 1.0}), Error);
  CHECK_THROWS_AS(pl({0, 1}, {0}), Error);
}

TEST_CASE("sobolev distance examples") {
  const Trajectory id{pl({0, 1}, {0, 1})};
  const Trajectory zero{pl({0, 1}, {0, 0})};
  CHECK(sobolev_distance(id, zero, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(sobolev_distance(id, id, 3.0) == 0.0);
  CHECK(sobolev_distance(id, zero, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(3.0) + 1.0).epsilon(1e-14));
  // Analytic inputs go through quadrature.
  CHECK(sobolev_distance(Trajectory{AnalyticTrajectory::affine(0, 1)},
                         Trajectory{AnalyticTrajectory::constant(0)}, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(3.0) + 1.0).epsilon(1e-9));
  CHECK_THROWS_AS(sobolev_distance(id, zero, 0.5), Error);
}

TEST_CASE("sobolev distance splits at sign changes") {
  // y1 - y2 = 2t - 1 changes sign at 1/2: integral |2t - 1| = 1/2.
  const Trajectory a{pl({0, 1}, {-1, 1})};
  const Trajectory b{pl({0, 1}, {0, 0})};
  const SobolevParts parts = sobolev_parts(a, b, 1.0);
  CHECK(parts.value_power == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(parts.derivative_power == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_abs_linear_power(-1, 1, 1, 2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate_abs_linear_power(1, 1 + 1e-9, 1, 1.5) == doctest::Approx(1.0 + 7.5e-10).epsilon(1e-12));
}

TEST_CASE("sobolev distance is a metric on random PL trajectories and matches a Riemann sum") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_pl(rng, 1 + static_cast<int>(rng() % 7), -1, 1);
    const auto b = oracle::random_pl(rng, 1 + static_cast<int>(rng() % 7), -1, 1);
    const auto c = oracle::random_pl(rng, 1 + static_cast<int>(rng() % 7), -1, 1);
    const Trajectory A{pl(a.t, a.y)}, B{pl(b.t, b.y)}, C{pl(c.t, c.y)};
    const double ab = sobolev_distance(A, B), ba = sobolev_distance(B, A);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
    CHECK(sobolev_distance(A, A) == 0.0);
    CHECK(ab <= sobolev_distance(A, C) + sobolev_distance(C, B) + 1e-12);
    if (trial < 10) CHECK(ab == doctest::Approx(riemann_w11(a, b, 400000)).epsilon(1e-4));
  }
}

TEST_CASE("range bounds") {
  const RangeBounds r = range_bounds(Trajectory{pl({0, 0.5, 1}, {0, 1, 0.5})});
  CHECK(r.alpha == 0.0);
  CHECK(r.beta == 1.0);
  const RangeBounds s = range_bounds(Trajectory{AnalyticTrajectory::sqrt()});
  CHECK(s.alpha == 0.0);
  CHECK(s.beta == 1.0);
  const RangeBounds c = range_bounds(Trajectory{AnalyticTrajectory::constant(0.3)});
  CHECK(c.alpha == 0.3);
  CHECK(c.beta == 0.3);
}

TEST_CASE("discretize on uniform and graded meshes") {
  const PLTrajectory a = discretize(AnalyticTrajectory::sqrt(), 2, 1.0);
  REQUIRE(a.node_count() == 3);
  CHECK(a.times()[1] == 0.5);
  CHECK(a.values()[1] == doctest::Approx(std::sqrt(0.5)));
  CHECK(a.values()[2] == 1.0);

  const PLTrajectory b = discretize(AnalyticTrajectory::power(1.0), 7, 1.0);
  for (std::size_t k = 0; k < b.node_count(); ++k) CHECK(b.values()[k] == doctest::Approx(b.times()[k]));

  const PLTrajectory c = discretize(AnalyticTrajectory::sqrt(), 4, 2.0);
  const double expect[] = {0.0, 1.0 / 16, 0.25, 9.0 / 16, 1.0};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(c.times()[k] == doctest::Approx(expect[k]).epsilon(1e-15));
    CHECK(c.values()[k] == doctest::Approx(std::sqrt(expect[k])).epsilon(1e-15));
  }
  CHECK_THROWS_AS(discretize(AnalyticTrajectory::sqrt(), 1), Error);
}

TEST_CASE("discretization error decreases along n = 2^k for t^(2/3)") {
  const AnalyticTrajectory y = AnalyticTrajectory::power(2.0 / 3.0);
  double prev = 1e9;
  for (std::size_t n = 4; n <= 256; n *= 2) {
    const double d = sobolev_distance(Trajectory{discretize(y, n, 3.0)}, Trajectory{y}, 1.0);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("value difference across a segment equals slope times length") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_pl(rng, 6, -3, 3);
    const PLTrajectory y = pl(p.t, p.y);
    for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
      const double len = p.t[i + 1] - p.t[i];
      CHECK(y.values()[i + 1] - y.values()[i] == doctest::Approx(y.slope(i) * len).epsilon(1e-14));
    }
  }
}
