// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "varigap/conditions.hpp"
#include "varigap/error.hpp"
#include "varigap/expression.hpp"
#include "varigap/functional.hpp"
#include "varigap/repair.hpp"

using namespace varigap;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

PLTrajectory pl(std::vector<double> t, std::vector<double> y) {
  return PLTrajectory(Partition(std::move(t)), std::move(y));
}

const RepairCheck* find_check(const RepairReport& r, const std::string& prefix) {
  for (const RepairCheck& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------

void ac1(Outcome& o) {
  const Lagrangian L = Lagrangian::builtin("gap_example");
  for (double cap : {2.0, 1e6, 1e12, 1e300}) {
    QuadConfig q;
    q.cap = cap;
    const EnergyResult r = energy(L, Trajectory{pl({0, 1}, {0, 0})}, q);
    o.require(r.converged() && r.value.value() == 1.0, "F(0) = 1 at cap " + std::to_string(cap));
  }
  const EnergyResult s = energy(L, Trajectory{AnalyticTrajectory::sqrt()});
  o.require(s.converged() && std::abs(s.value.value()) <= 1e-10, "F(sqrt) = 0");
  o.detail << "F(0)=1, F(sqrt)=" << s.value.to_double();
}

void ac2(Outcome& o) {
  const auto t0 = Clock::now();
  const Lagrangian L = Lagrangian::builtin("gap_example");
  oracle::Rng rng(20240601);
  double smallest_last = HUGE_VAL;
  for (int i = 0; i < 20; ++i) {
    const int segments = 2 + static_cast<int>(rng() % 11);
    auto p = oracle::random_pl(rng, segments, -1, 1, 1e-2);
    p.y[0] = 0.0;
    const PLTrajectory y = pl(p.t, p.y);
    const EnergyResult e = energy(L, Trajectory{y});
    const GapCertificate c = gap_certificate(y);
    o.require(!e.converged(), "energy non-converged on instance " + std::to_string(i));
    o.require(c.verdict == CertificateVerdict::Divergent, "divergent verdict");
    o.require(c.bounds.size() == 30, "30 bounds");
    for (std::size_t k = 1; k < c.bounds.size(); ++k)
      o.require(c.bounds[k] > c.bounds[k - 1], "strictly increasing bounds");
    o.require(c.bounds.back() > 1e11, "last bound > 1e11");
    smallest_last = std::min(smallest_last, c.bounds.back());
  }
  const double dt = seconds_since(t0);
  o.require(dt <= 10.0, "runtime <= 10 s");
  o.detail << "20 instances, min last bound " << smallest_last << ", " << dt << " s";
}

void ac3(Outcome& o) {
  const Lagrangian L = Lagrangian::parse("v^2 / y^4");
  oracle::Rng rng(77);
  double worst = HUGE_VAL;
  for (int i = 0; i < 1000; ++i) {
    const int segments = 1 + static_cast<int>(rng() % 8);
    const auto p = oracle::random_pl(rng, segments, 0.05, 2.0);
    const PLTrajectory y = pl(p.t, p.y);
    double c = oracle::unit(rng), d = oracle::unit(rng);
    if (c > d) std::swap(c, d);
    if (d - c < 1e-3) d = std::min(1.0, c + 1e-3);
    // integral over [c, d] of y'^2 / y^4, segment by segment
    double lhs = 0.0;
    for (std::size_t s = 0; s + 1 < p.t.size(); ++s) {
      const double a = std::max(c, p.t[s]), b = std::min(d, p.t[s + 1]);
      if (!(b > a)) continue;
      const EnergyResult r = segment_energy(L, a, b, y.eval(a), y.slope(s), QuadConfig{});
      o.require(r.converged(), "segment quadrature converged");
      lhs += r.value.to_double();
    }
    const double rhs = (1.0 / (d - c)) * std::pow(1.0 / y.eval(c) - 1.0 / y.eval(d), 2);
    const double slack = (lhs - rhs) / std::max(rhs, 1e-300);
    worst = std::min(worst, rhs > 0.0 ? slack : 0.0);
    o.require(slack >= -1e-8 || lhs >= rhs, "relative slack >= -1e-8");
  }
  o.detail << "1000 instances, worst relative slack " << worst;
}

void ac4(Outcome& o) {
  const auto t0 = Clock::now();
  const PLTrajectory y = discretize(AnalyticTrajectory::power(2.0 / 3.0), 256, 3.0);
  const Lagrangian L = Lagrangian::builtin("quadratic");
  const auto reps = sweep(y, L, RhoPair::constant(-1, 1), {2, 4, 8, 16, 32, 64}, {});
  const double Fy = reps.front().energy_y.value.value();
  o.require(std::abs(Fy - 4.0 / 3.0) <= 0.01 * 4.0 / 3.0, "F(y) within 1% of 4/3");
  double prev_d = HUGE_VAL, prev_g = HUGE_VAL;
  for (const RepairReport& r : reps) {
    const double g = std::abs(r.energy_w.value.to_double() - Fy);
    o.require(r.sobolev_distance < prev_d, "distance strictly decreasing");
    o.require(g < prev_g, "|F(w) - F(y)| strictly decreasing");
    prev_d = r.sobolev_distance;
    prev_g = g;
  }
  o.require(prev_d < 0.02, "distance < 0.02 at M = 64");
  o.require(prev_g < 0.02 * Fy, "energy gap < 2% at M = 64");
  const double dt = seconds_since(t0);
  o.require(dt <= 30.0, "runtime <= 30 s");
  o.detail << "F(y)=" << Fy << ", dist(64)=" << prev_d << ", |dF|(64)/F=" << prev_g / Fy << ", "
           << dt << " s";
}

void ac5(Outcome& o) {
  const Lagrangian quad = Lagrangian::builtin("quadratic");
  const Lagrangian soft = Lagrangian::parse("v^2 + y^2");
  std::vector<PLTrajectory> corpus;
  oracle::Rng rng(555);
  for (int i = 0; i < 16; ++i) {
    auto p = oracle::random_pl(rng, 4 + static_cast<int>(rng() % 20), -1.5, 1.5);
    p.y[0] = 0.0;
    corpus.push_back(pl(p.t, p.y));
  }
  corpus.push_back(discretize(AnalyticTrajectory::power(2.0 / 3.0), 128, 3.0));
  corpus.push_back(discretize(AnalyticTrajectory::sqrt(), 64, 2.0));
  corpus.push_back(pl({0, 0.25, 0.5, 1}, {0, 1, 0, 0.5}));
  corpus.push_back(pl({0, 0.5, 1}, {0, -2, -2}));

  const std::vector<RhoPair> fields = {RhoPair::constant(-1, 1), RhoPair::constant(-8, 8),
                                       RhoPair::constant(-30, 5),
                                       RhoPair("-(1 + z^2)", "2 + z^2")};
  const std::vector<double> thresholds = {0.5, 2.0, 6.0};
  int runs = 0, extended = 0;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    for (const RhoPair& rho : fields) {
      for (double M : thresholds) {
        RepairOptions opt;
        opt.threshold = M;
        opt.mode = (runs % 4 == 3) ? ExtensionMode::Constant : ExtensionMode::Ode;
        opt.p = (runs % 5 == 0) ? 2.0 : 1.0;
        const Lagrangian& L = (ci % 2 == 0) ? quad : soft;
        const RepairReport r = repair(corpus[ci], L, rho, opt);
        ++runs;
        if (r.T < 1.0) ++extended;
        const std::string tag = " (run " + std::to_string(runs) + ")";
        o.require(std::abs(r.w.eval(0.0)) == 0.0, "w(0) = 0" + tag);
        for (const char* name :
             {"psi o phi", "|v'| <= rho_max", "integral |phi' - 1|", "m <= rho_max",
              "P1 + P2 + P3"}) {
          const RepairCheck* c = find_check(r, name);
          if (c == nullptr) continue;  // not applicable to this run (no bad set, T >= 1)
          o.require(c->ok, std::string(name) + tag);
        }
        if (r.T < 1.0 && r.mode == ExtensionMode::Ode) {
          const double bound = r.rho.rho_max / (r.range.beta - r.range.alpha) * (1.0 - r.T) + 1.0;
          o.require(r.m <= bound, "m bound" + tag);
        }
        const double psum = r.P1 + r.P2 + r.P3;
        o.require(std::abs(psum - r.derivative_distance_power) <=
                      1e-9 * std::max(1.0, r.derivative_distance_power),
                  "P reconstruction" + tag);
        o.require(r.all_ok, "all pipeline checks" + tag);
      }
    }
  }
  o.require(runs >= 200, "at least 200 runs");
  o.require(extended > 0, "some runs with T < 1");
  o.detail << runs << " runs, " << extended << " with T < 1";
}

void ac6(Outcome& o) {
  const RhoPair unit = RhoPair::constant(-1, 1);
  const Extension a = extend(Polyline({0.0, 0.9}, {0.0, 0.5}), unit, {1, 1}, {0, 1},
                             ExtensionMode::Ode);
  o.require(a.m == 0, "single leg has no switch");
  o.require(std::abs(a.w.eval(1.0) - 0.6) <= 1e-9, "w(1) = 0.6");
  o.require(std::abs(a.w.eval(0.95) - 0.55) <= 1e-9, "w(0.95) = 0.55");

  const Extension b = extend(Polyline({0.0, 0.9}, {0.0, 0.98}), unit, {1, 1}, {0, 1},
                             ExtensionMode::Ode);
  o.require(b.m == 1, "one switch");
  o.require(b.tau.size() == 3 && std::abs(b.tau[1] - 0.92) <= 1e-9, "tau_1 = 0.92");
  o.require(std::abs(b.w.eval(1.0) - 0.92) <= 1e-9, "w(1) = 0.92");
  o.require(b.m <= 1.0 * 0.1 / 1.0 + 1.0, "m bound");

  const Extension c = extend(Polyline({0.0, 0.9}, {0.0, 0.5}), unit, {1, 1}, {0, 1},
                             ExtensionMode::Constant);
  bool exact = c.m == 0;
  for (double t : {0.9, 0.91, 0.95, 0.999, 1.0}) exact = exact && c.w.eval(t) == 0.5;
  o.require(exact, "constant mode exact");
  o.detail << "w(1)=" << a.w.eval(1.0) << " / " << b.w.eval(1.0) << ", tau_1=" << b.tau[1];
}

void ac7(Outcome& o) {
  const RhoPair unit = RhoPair::constant(-1, 1);
  const Lagrangian quad = Lagrangian::builtin("quadratic");
  const Lagrangian gap = Lagrangian::builtin("gap_example");
  const Verdict q = check_R(quad, unit, {-10, 10});
  o.require(q.status == VerdictStatus::NoViolationFound && q.sup_estimate == 1.0,
            "check_R quadratic passes with sup 1");

  const Verdict g = check_R(gap, unit, {-1, 1});
  o.require(g.status == VerdictStatus::Violation && g.witness.has_value(), "check_R gap fails");
  if (g.witness) {
    const Witness& w = *g.witness;
    const double vel = w.side ? unit.eval(*w.side, w.y) : w.v;
    const ExtendedValue x = eval_L(gap, w.y, vel);
    o.require(x.to_double() > kDefaultConditionCap, "witness re-evaluates above cap");
    o.detail << "witness z=" << w.y << " L=" << x.to_double() << "; ";
  }
  const Verdict b = check_B(gap, 1, 1);
  o.require(b.status == VerdictStatus::Violation, "check_B flags gap_example");

  int implications = 0;
  for (const std::string& name : Lagrangian::builtin_names()) {
    const Lagrangian L = Lagrangian::builtin(name);
    for (double K : {0.5, 1.0, 2.0}) {
      for (double r : {1.0, 2.0}) {
        if (check_B(L, K, r).status != VerdictStatus::NoViolationFound) continue;
        ++implications;
        o.require(check_R(L, RhoPair::constant(-r / 2, r / 2), {-K, K}).status ==
                      VerdictStatus::NoViolationFound,
                  "B implies R for " + name);
      }
    }
  }
  o.detail << implications << " B=>R instances";
}

void ac8(Outcome& o) {
  struct Smooth {
    const char* expr;
    std::function<double(double, double)> f;
  };
  const std::vector<Smooth> family = {
      {"v^2", [](double, double v) { return v * v; }},
      {"v^2 + y^2", [](double y, double v) { return v * v + y * y; }},
      {"(1 + y^2) * v^2", [](double y, double v) { return (1 + y * y) * v * v; }},
      {"exp(y) * v^2 + 1", [](double y, double v) { return std::exp(y) * v * v + 1; }},
      {"(v - y)^2 + abs(v)", [](double y, double v) { return (v - y) * (v - y) + std::abs(v); }},
  };
  oracle::Rng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Smooth& s = family[static_cast<std::size_t>(i) % family.size()];
    // Nodes on a 1/1000 grid so the midpoint rule never straddles a kink.
    const int segments = 2 + static_cast<int>(rng() % 8);
    std::vector<int> ticks = {0, 1000};
    while (static_cast<int>(ticks.size()) < segments + 1) {
      const int k = 1 + static_cast<int>(rng() % 999);
      if (std::find(ticks.begin(), ticks.end(), k) == ticks.end()) ticks.push_back(k);
    }
    std::sort(ticks.begin(), ticks.end());
    std::vector<double> t, y;
    for (int k : ticks) {
      t.push_back(k / 1000.0);
      y.push_back(oracle::uniform(rng, -1, 1));
    }
    const EnergyResult r = energy(Lagrangian::parse(s.expr), Trajectory{pl(t, y)});
    o.require(r.converged(), "energy converged");
    const double ref = oracle::midpoint_energy(s.f, t, y, 1'000'000);
    const double rel = std::abs(r.value.to_double() - ref) / std::abs(ref);
    worst = std::max(worst, rel);
    o.require(rel <= 1e-6, std::string("energy vs midpoint for ") + s.expr);
  }

  int points = 0;
  bool agree = true;
  for (int tree = 0; tree < 100; ++tree) {
    const oracle::TreePtr tr = oracle::random_tree(rng, 5);
    const expr::Program prog =
        expr::Program::compile(expr::parse(oracle::render(*tr), expr::Context::Lagrangian));
    for (int k = 0; k < 100; ++k, ++points) {
      const double y = oracle::uniform(rng, -4, 4);
      const double v = k % 7 == 0 ? 0.0 : oracle::uniform(rng, -4, 4);
      bool fa = false, fb = false;
      double a = 0, b = 0;
      try {
        a = oracle::eval(*tr, y, v);
      } catch (const oracle::EvalError&) {
        fa = true;
      }
      try {
        const std::array<double, 2> vars{y, v};
        b = prog.run(vars);
      } catch (const Error&) {
        fb = true;
      }
      if (fa != fb || (!fa && a != b)) agree = false;
    }
  }
  o.require(points == 10000 && agree, "expression evaluator agrees exactly with the oracle");
  o.detail << "50 energies, worst rel err " << worst << "; " << points << " expression points";
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(VARIGAP_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (f == nullptr) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  status = pclose(f);
  return out;
}

void ac9(Outcome& o) {
  const std::vector<std::string> commands = {
      "evaluate --lagrangian builtin:gap_example --trajectory builtin:sqrt",
      "evaluate --lagrangian builtin:gap_example --trajectory builtin:zero --out csv",
      "evaluate --lagrangian builtin:gap_example --trajectory builtin:sqrt_pl16",
      "evaluate --lagrangian builtin:quadratic --trajectory builtin:random --seed 7",
      "repair --lagrangian builtin:quadratic --trajectory builtin:power_2_3_pl256 "
      "--rho '{\"minus\":\"-1\",\"plus\":\"1\"}' --sweep 2,4,8 --out csv",
      "repair --lagrangian builtin:quadratic --trajectory builtin:random --seed 3 "
      "--rho '{\"minus\":\"-8\",\"plus\":\"8\"}' --threshold 0.5",
      "repair --lagrangian builtin:gap_example --trajectory builtin:sqrt_pl16 "
      "--rho '{\"minus\":\"-1\",\"plus\":\"1\"}' --threshold 4",
      "gap-demo",
      "gap-demo --out csv --terms 12",
      "gap-demo --out svg",
      "check --condition R --lagrangian builtin:gap_example "
      "--rho '{\"minus\":\"-1\",\"plus\":\"1\"}'",
      "check --condition Ry --lagrangian builtin:quadratic "
      "--rho '{\"minus\":\"-1\",\"plus\":\"1\"}' --trajectory builtin:power_2_3_pl256",
      "check --condition B --lagrangian builtin:gap_example --K 1 --r 1",
      "check --condition zero-speed --lagrangian builtin:gap_example --interval 0,1",
  };
  for (const std::string& c : commands) {
    int s1 = 0, s2 = 0;
    const std::string a = run_cli(c, s1);
    const std::string b = run_cli(c, s2);
    o.require(!a.empty(), "output present: " + c);
    o.require(a == b && s1 == s2, "byte-identical: " + c);
  }
  o.detail << commands.size() << " commands run twice";
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    void (*run)(Outcome&);
  };
  const Criterion criteria[] = {
      {"AC1", "gap example values", ac1},
      {"AC2", "gap occurrence on random Lipschitz trajectories", ac2},
      {"AC3", "Jensen soundness", ac3},
      {"AC4", "repair convergence on t^(2/3)", ac4},
      {"AC5", "pipeline invariants", ac5},
      {"AC6", "extension modes", ac6},
      {"AC7", "condition checks", ac7},
      {"AC8", "oracle equivalence", ac8},
      {"AC9", "CLI determinism", ac9},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    std::printf("%s %s: %s [%s] (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.str().c_str(), dt);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
