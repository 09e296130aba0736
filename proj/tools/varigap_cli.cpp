// varigap command-line tool: evaluate, repair, gap-demo, check.
//
// Exit codes: 0 success / converged / divergent certificate / no violation,
// 2 invalid input, 3 condition violated (or rho rejected), 4 non-converged
// energy, inconclusive certificate or failed repair invariant.

#include <CLI11.hpp>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "varigap/varigap.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;
constexpr int kExitNotConverged = 4;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw Failure{code, std::move(message)}; }

int exit_for(vg_status s) {
  return s == VG_ERR_CONDITION_VIOLATED || s == VG_ERR_CONDITION_SIGN ? kExitViolation
                                                                       : kExitInvalid;
}

void check(vg_status s, const std::string& context) {
  if (s == VG_OK) return;
  std::string msg = context + ": " + vg_last_error();
  if (vg_last_error_position() > 0 && msg.find("position") == std::string::npos)
    msg += " (position " + std::to_string(vg_last_error_position()) + ")";
  fail(exit_for(s), msg);
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using LagrangianPtr = std::unique_ptr<vg_lagrangian, Deleter<vg_lagrangian, vg_lagrangian_free>>;
using TrajectoryPtr = std::unique_ptr<vg_trajectory, Deleter<vg_trajectory, vg_trajectory_free>>;
using RhoPtr = std::unique_ptr<vg_rho, Deleter<vg_rho, vg_rho_free>>;

struct Text {
  char* s = nullptr;
  ~Text() { vg_string_free(s); }
};

std::string read_source(const std::string& source, const char* what) {
  if (!source.empty() && source.front() == '{') return source;
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(kExitInvalid, std::string("cannot read ") + what + " file '" + source + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool strip_builtin(const std::string& source, std::string& name) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) != 0) return false;
  name = source.substr(prefix.size());
  return true;
}

LagrangianPtr load_lagrangian(const std::string& source) {
  vg_lagrangian* L = nullptr;
  std::string name;
  if (strip_builtin(source, name)) {
    check(vg_lagrangian_builtin(name.c_str(), &L), "lagrangian");
  } else {
    check(vg_lagrangian_from_json(read_source(source, "lagrangian").c_str(), &L), "lagrangian");
  }
  return LagrangianPtr(L);
}

RhoPtr load_rho(const std::string& source) {
  vg_rho* r = nullptr;
  check(vg_rho_from_json(read_source(source, "rho").c_str(), &r), "rho");
  return RhoPtr(r);
}

// Uniform double in [0, 1) from the top 53 bits; same stream on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TrajectoryPtr random_trajectory(std::uint64_t seed, std::size_t segments) {
  std::mt19937_64 rng(seed);
  std::vector<double> t(segments + 1), y(segments + 1, 0.0);
  for (std::size_t k = 0; k <= segments; ++k) t[k] = static_cast<double>(k) / segments;
  t.back() = 1.0;
  for (std::size_t k = 1; k <= segments; ++k) y[k] = y[k - 1] + (unit(rng) - 0.5);
  vg_trajectory* out = nullptr;
  check(vg_trajectory_pl(t.data(), y.data(), t.size(), &out), "trajectory");
  return TrajectoryPtr(out);
}

TrajectoryPtr discretized(const char* family, double a, std::size_t n, double grading) {
  vg_trajectory* an = nullptr;
  check(vg_trajectory_analytic(family, a, 0.0, &an), "trajectory");
  TrajectoryPtr holder(an);
  vg_trajectory* out = nullptr;
  check(vg_trajectory_discretize(an, n, grading, &out), "trajectory");
  return TrajectoryPtr(out);
}

TrajectoryPtr load_trajectory(const std::string& source, std::uint64_t seed) {
  std::string name;
  vg_trajectory* y = nullptr;
  if (!strip_builtin(source, name)) {
    check(vg_trajectory_from_json(read_source(source, "trajectory").c_str(), &y), "trajectory");
    return TrajectoryPtr(y);
  }
  if (name == "sqrt") {
    check(vg_trajectory_analytic("sqrt", 0, 0, &y), "trajectory");
  } else if (name == "zero") {
    check(vg_trajectory_analytic("constant", 0, 0, &y), "trajectory");
  } else if (name == "identity") {
    check(vg_trajectory_analytic("affine", 0, 1, &y), "trajectory");
  } else if (name == "power_2_3") {
    check(vg_trajectory_analytic("power", 2.0 / 3.0, 0, &y), "trajectory");
  } else if (name == "sqrt_pl16") {
    return discretized("sqrt", 0, 16, 2.0);
  } else if (name == "power_2_3_pl256") {
    return discretized("power", 2.0 / 3.0, 256, 3.0);
  } else if (name == "random") {
    return random_trajectory(seed, 8);
  } else {
    fail(kExitInvalid, "unknown builtin trajectory '" + name + "'");
  }
  return TrajectoryPtr(y);
}

// Analytic inputs are replaced by their interpolant on the graded mesh.
TrajectoryPtr as_pl(TrajectoryPtr y, std::size_t nodes, double grading) {
  if (vg_trajectory_is_pl(y.get())) return y;
  vg_trajectory* out = nullptr;
  check(vg_trajectory_discretize(y.get(), nodes, grading, &out), "trajectory");
  return TrajectoryPtr(out);
}

vg_format parse_format(const std::string& s) {
  if (s == "json") return VG_FORMAT_JSON;
  if (s == "csv") return VG_FORMAT_CSV;
  return VG_FORMAT_SVG;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || errno != 0 || !std::isfinite(x))
      fail(kExitInvalid, std::string("malformed ") + what + " '" + s + "'");
    out.push_back(x);
  }
  if (out.empty()) fail(kExitInvalid, std::string("empty ") + what);
  return out;
}

double default_cap() {
  const char* env = std::getenv("VARIGAP_CAP");
  if (env == nullptr || *env == '\0') return vg_quad_config_default().cap;
  const std::vector<double> v = parse_list(env, "VARIGAP_CAP");
  if (v.size() != 1 || !(v[0] > 1.0)) fail(kExitInvalid, "VARIGAP_CAP must be a number > 1");
  return v[0];
}

struct Options {
  std::string lagrangian;
  std::string trajectory;
  std::string rho;
  double p = 1.0;
  double tol = vg_quad_config_default().tol;
  std::optional<double> cap;
  std::optional<double> threshold;
  std::string sweep;
  std::string mode = "ode";
  std::string out = "json";
  std::uint64_t seed = 1;
  std::string condition;
  std::string interval = "-1,1";
  double K = 1.0;
  double r = 1.0;
  std::size_t samples = 0;
  std::size_t nodes = 0;
  double grading = 0.0;
  int terms = 30;

  vg_quad_config quad() const {
    vg_quad_config q = vg_quad_config_default();
    q.tol = tol;
    q.cap = cap ? *cap : default_cap();
    return q;
  }
};

void emit(const Text& t) {
  std::fwrite(t.s, 1, std::strlen(t.s), stdout);
  std::fflush(stdout);
}

int cmd_evaluate(const Options& o) {
  if (o.out == "svg") fail(kExitInvalid, "evaluate supports --out json|csv");
  const LagrangianPtr L = load_lagrangian(o.lagrangian);
  const TrajectoryPtr y = load_trajectory(o.trajectory, o.seed);
  const vg_quad_config q = o.quad();
  vg_energy_result r{};
  Text text;
  check(vg_energy(L.get(), y.get(), &q, &r, parse_format(o.out), &text.s), "energy");
  emit(text);
  return r.status == VG_ENERGY_CONVERGED ? kExitOk : kExitNotConverged;
}

int cmd_repair(const Options& o) {
  if (o.out == "svg") fail(kExitInvalid, "repair supports --out json|csv");
  const LagrangianPtr L = load_lagrangian(o.lagrangian);
  const RhoPtr rho = load_rho(o.rho);
  const TrajectoryPtr y = as_pl(load_trajectory(o.trajectory, o.seed), o.nodes ? o.nodes : 256,
                                o.grading > 0.0 ? o.grading : 3.0);
  const vg_quad_config q = o.quad();
  vg_repair_options ro = vg_repair_options_default();
  ro.p = o.p;
  ro.quad = q;
  ro.mode = o.mode == "constant" ? VG_EXTENSION_CONSTANT : VG_EXTENSION_ODE;
  if (o.samples) ro.condition_samples = o.samples;

  int status = 0;
  Text verdict;
  check(vg_check_Ry(L.get(), rho.get(), y.get(), ro.condition_samples, q.cap, &status,
                    VG_FORMAT_JSON, &verdict.s),
        "condition R_y");
  if (status != VG_VERDICT_NO_VIOLATION_FOUND) {
    emit(verdict);
    return status == VG_VERDICT_VIOLATION ? kExitViolation : kExitInvalid;
  }

  std::vector<double> Ms;
  if (o.threshold) {
    Ms.push_back(*o.threshold);
  } else if (!o.sweep.empty()) {
    Ms = parse_list(o.sweep, "sweep");
  } else {
    fail(kExitInvalid, "repair needs --threshold or --sweep");
  }
  int all_ok = 0, all_finite = 0;
  Text text;
  check(vg_repair_sweep(y.get(), L.get(), rho.get(), Ms.data(), Ms.size(), &ro, &all_ok,
                        &all_finite, parse_format(o.out), &text.s),
        "repair");
  emit(text);
  if (!all_ok) std::fprintf(stderr, "varigap: a repair invariant check failed\n");
  return all_ok && all_finite ? kExitOk : kExitNotConverged;
}

int cmd_gap_demo(const Options& o) {
  const std::string source = o.trajectory.empty() ? "builtin:sqrt_pl16" : o.trajectory;
  const TrajectoryPtr y = as_pl(load_trajectory(source, o.seed), o.nodes ? o.nodes : 16,
                                o.grading > 0.0 ? o.grading : 2.0);
  const vg_quad_config q = o.quad();
  int divergent = 0;
  Text text;
  vg_status s = vg_gap_certificate(y.get(), &q, o.terms, &divergent, parse_format(o.out), &text.s);
  if (s != VG_OK) {
    std::string msg = std::string("gap certificate: ") + vg_last_error();
    fail(kExitInvalid, msg);
  }
  emit(text);
  return divergent ? kExitOk : kExitNotConverged;
}

int cmd_check(const Options& o) {
  if (o.out == "svg") fail(kExitInvalid, "check supports --out json|csv");
  const LagrangianPtr L = load_lagrangian(o.lagrangian);
  const double cap = o.quad().cap;
  const vg_format fmt = parse_format(o.out);
  int status = 0;
  Text text;
  vg_status s = VG_OK;
  auto interval = [&] {
    const std::vector<double> iv = parse_list(o.interval, "interval");
    if (iv.size() != 2) fail(kExitInvalid, "--interval expects lo,hi");
    return iv;
  };
  if (o.condition == "R") {
    const RhoPtr rho = load_rho(o.rho);
    const auto iv = interval();
    s = vg_check_R(L.get(), rho.get(), iv[0], iv[1], o.samples ? o.samples : 4097, cap, &status,
                   fmt, &text.s);
  } else if (o.condition == "Ry") {
    const RhoPtr rho = load_rho(o.rho);
    if (o.trajectory.empty()) fail(kExitInvalid, "check Ry needs --trajectory");
    const TrajectoryPtr y = load_trajectory(o.trajectory, o.seed);
    s = vg_check_Ry(L.get(), rho.get(), y.get(), o.samples ? o.samples : 4097, cap, &status, fmt,
                    &text.s);
  } else if (o.condition == "B") {
    s = vg_check_B(L.get(), o.K, o.r, o.samples ? o.samples : 257, cap, &status, fmt, &text.s);
  } else {
    double lo, hi;
    if (!o.trajectory.empty()) {
      const TrajectoryPtr y = load_trajectory(o.trajectory, o.seed);
      check(vg_trajectory_range(y.get(), &lo, &hi), "trajectory");
    } else {
      const auto iv = interval();
      lo = iv[0];
      hi = iv[1];
    }
    s = vg_check_zero_speed(L.get(), lo, hi, o.samples ? o.samples : 4097, cap, &status, fmt,
                            &text.s);
  }
  check(s, "check");
  emit(text);
  switch (status) {
    case VG_VERDICT_NO_VIOLATION_FOUND: return kExitOk;
    case VG_VERDICT_VIOLATION: return kExitViolation;
    default: return kExitInvalid;
  }
}

void add_quad(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--cap", o.cap, "divergence cap (default 1e12 or $VARIGAP_CAP)");
  sub->add_option("--seed", o.seed, "seed for builtin:random");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varigap: one-dimensional autonomous variational problems"};
  app.require_subcommand(1);
  Options o;

  auto* ev = app.add_subcommand("evaluate", "energy F(y) of a trajectory");
  ev->add_option("--lagrangian", o.lagrangian, "PATH | builtin:NAME | inline JSON")->required();
  ev->add_option("--trajectory", o.trajectory, "PATH | builtin:NAME | inline JSON")->required();
  ev->add_option("--out", o.out)->check(CLI::IsMember({"json", "csv"}));
  add_quad(ev, o);

  auto* rp = app.add_subcommand("repair", "Lipschitz repair pipeline");
  rp->add_option("--lagrangian", o.lagrangian)->required();
  rp->add_option("--trajectory", o.trajectory)->required();
  rp->add_option("--rho", o.rho, "PATH | inline JSON")->required();
  rp->add_option("--p", o.p, "Sobolev exponent");
  auto* th = rp->add_option("--threshold", o.threshold, "slope threshold M");
  auto* sw = rp->add_option("--sweep", o.sweep, "increasing thresholds a,b,c");
  th->excludes(sw);
  rp->add_option("--mode", o.mode)->check(CLI::IsMember({"ode", "constant"}));
  rp->add_option("--out", o.out)->check(CLI::IsMember({"json", "csv"}));
  rp->add_option("--samples", o.samples, "grid size of the R_y check");
  rp->add_option("--nodes", o.nodes, "mesh size for analytic inputs (default 256)");
  rp->add_option("--grading", o.grading, "mesh grading for analytic inputs (default 3)");
  add_quad(rp, o);

  auto* gd = app.add_subcommand("gap-demo", "divergence certificate for the gap Lagrangian");
  gd->add_option("--trajectory", o.trajectory, "PATH | builtin:NAME | inline JSON (default builtin:sqrt_pl16)");
  gd->add_option("--terms", o.terms, "number of c_k terms")->check(CLI::PositiveNumber);
  gd->add_option("--out", o.out)->check(CLI::IsMember({"json", "csv", "svg"}));
  gd->add_option("--nodes", o.nodes, "mesh size for analytic inputs (default 16)");
  gd->add_option("--grading", o.grading, "mesh grading for analytic inputs (default 2)");
  add_quad(gd, o);

  auto* ck = app.add_subcommand("check", "sampled condition checks");
  ck->add_option("--condition", o.condition)
      ->required()
      ->check(CLI::IsMember({"R", "Ry", "B", "zero-speed"}));
  ck->add_option("--lagrangian", o.lagrangian)->required();
  ck->add_option("--rho", o.rho);
  ck->add_option("--trajectory", o.trajectory);
  ck->add_option("--interval", o.interval, "lo,hi (default -1,1)");
  ck->add_option("--K", o.K, "state half-width for condition B");
  ck->add_option("--r", o.r, "velocity half-width for condition B");
  ck->add_option("--samples", o.samples, "grid size");
  ck->add_option("--out", o.out)->check(CLI::IsMember({"json", "csv"}));
  add_quad(ck, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (ev->parsed()) return cmd_evaluate(o);
    if (rp->parsed()) return cmd_repair(o);
    if (gd->parsed()) return cmd_gap_demo(o);
    if (o.condition != "B" && o.condition != "zero-speed" && o.rho.empty() && ck->parsed())
      fail(kExitInvalid, "check " + o.condition + " needs --rho");
    return cmd_check(o);
  } catch (const Failure& f) {
    std::fprintf(stderr, "varigap: %s\n", f.message.c_str());
    return f.code;
  }
}
