#include "varigap/varigap.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "varigap/conditions.hpp"
#include "varigap/error.hpp"
#include "varigap/functional.hpp"
#include "varigap/io.hpp"
#include "varigap/lagrangian.hpp"
#include "varigap/repair.hpp"
#include "varigap/trajectory.hpp"

struct vg_lagrangian {
  varigap::Lagrangian impl;
};
struct vg_trajectory {
  varigap::Trajectory impl;
};
struct vg_rho {
  varigap::RhoPair impl;
};

namespace {

using varigap::Error;
using varigap::ErrorCode;

thread_local std::string g_last_error;
thread_local std::size_t g_last_position = 0;

vg_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return VG_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return VG_ERR_DOMAIN;
    case ErrorCode::Parse: return VG_ERR_PARSE;
    case ErrorCode::Evaluation: return VG_ERR_EVALUATION;
    case ErrorCode::Nonnegativity: return VG_ERR_NONNEGATIVITY;
    case ErrorCode::AmbiguousPoint: return VG_ERR_AMBIGUOUS_POINT;
    case ErrorCode::SingularEndpoint: return VG_ERR_SINGULAR_ENDPOINT;
    case ErrorCode::Precondition: return VG_ERR_PRECONDITION;
    case ErrorCode::ConditionSign: return VG_ERR_CONDITION_SIGN;
    case ErrorCode::ConditionViolated: return VG_ERR_CONDITION_VIOLATED;
    case ErrorCode::ToleranceNotMet: return VG_ERR_TOLERANCE_NOT_MET;
    case ErrorCode::Internal: return VG_ERR_INTERNAL;
  }
  return VG_ERR_INTERNAL;
}

vg_status fail(vg_status s, std::string msg, std::size_t pos = 0) {
  g_last_error = std::move(msg);
  g_last_position = pos;
  return s;
}

template <class F>
vg_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    g_last_position = 0;
    return VG_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what(), e.position());
  } catch (const std::bad_alloc&) {
    return fail(VG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VG_ERR_INTERNAL, e.what());
  }
}

#define VG_REQUIRE(ptr)                                                    \
  do {                                                                     \
    if ((ptr) == nullptr) return fail(VG_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

varigap::QuadConfig to_quad(const vg_quad_config* q) {
  varigap::QuadConfig c;
  if (q != nullptr) {
    c.tol = q->tol;
    c.cap = q->cap;
    c.max_depth = q->max_depth;
    c.singular_split = q->singular_split;
  }
  c.validate();
  return c;
}

const varigap::PLTrajectory& require_pl(const vg_trajectory* y) {
  const auto* pl = std::get_if<varigap::PLTrajectory>(&y->impl);
  if (pl == nullptr)
    throw Error(ErrorCode::Precondition, "a piecewise-linear trajectory is required");
  return *pl;
}

template <class T>
void emit(const T& value, vg_format format, char** text) {
  if (text == nullptr) return;
  switch (format) {
    case VG_FORMAT_JSON: *text = dup_string(varigap::io::to_json(value)); return;
    case VG_FORMAT_CSV: *text = dup_string(varigap::io::to_csv(value)); return;
    case VG_FORMAT_SVG: break;
  }
  throw Error(ErrorCode::InvalidArgument, "SVG output is only available for gap certificates");
}

void emit_verdict(const varigap::Verdict& v, int* status, vg_format format, char** text) {
  if (status != nullptr) *status = static_cast<int>(v.status);
  emit(v, format, text);
}

}  // namespace

extern "C" {

const char* vg_version(void) { return "1.0.0"; }

const char* vg_status_name(vg_status status) {
  switch (status) {
    case VG_OK: return "ok";
    case VG_ERR_NULL_ARGUMENT: return "null-argument";
    default: break;
  }
  return varigap::to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1));
}

const char* vg_last_error(void) { return g_last_error.c_str(); }
size_t vg_last_error_position(void) { return g_last_position; }
void vg_string_free(char* s) { std::free(s); }

vg_quad_config vg_quad_config_default(void) {
  const varigap::QuadConfig c;
  return vg_quad_config{c.tol, c.cap, c.max_depth, c.singular_split};
}

vg_repair_options vg_repair_options_default(void) {
  const varigap::RepairOptions o;
  return vg_repair_options{o.p, vg_quad_config_default(), VG_EXTENSION_ODE, o.condition_samples,
                           o.rho_samples};
}

vg_status vg_lagrangian_builtin(const char* name, vg_lagrangian** out) {
  VG_REQUIRE(name);
  VG_REQUIRE(out);
  return guard([&] { *out = new vg_lagrangian{varigap::Lagrangian::builtin(name)}; });
}

vg_status vg_lagrangian_parse(const char* expr, const char* state_var, const char* velocity_var,
                              vg_lagrangian** out) {
  VG_REQUIRE(expr);
  VG_REQUIRE(out);
  return guard([&] {
    std::vector<std::string> vars = {state_var ? state_var : "y", velocity_var ? velocity_var : "v"};
    *out = new vg_lagrangian{varigap::Lagrangian::parse(expr, std::move(vars))};
  });
}

vg_status vg_lagrangian_from_json(const char* json, vg_lagrangian** out) {
  VG_REQUIRE(json);
  VG_REQUIRE(out);
  return guard([&] { *out = new vg_lagrangian{varigap::io::lagrangian_from_json(json)}; });
}

vg_status vg_lagrangian_eval(const vg_lagrangian* L, double y, double v, double* out) {
  VG_REQUIRE(L);
  VG_REQUIRE(out);
  return guard([&] { *out = L->impl.eval_double(y, v); });
}

void vg_lagrangian_free(vg_lagrangian* L) { delete L; }

vg_status vg_trajectory_from_json(const char* json, vg_trajectory** out) {
  VG_REQUIRE(json);
  VG_REQUIRE(out);
  return guard([&] { *out = new vg_trajectory{varigap::io::trajectory_from_json(json)}; });
}

vg_status vg_trajectory_pl(const double* t, const double* y, size_t n, vg_trajectory** out) {
  VG_REQUIRE(t);
  VG_REQUIRE(y);
  VG_REQUIRE(out);
  return guard([&] {
    varigap::Partition part(std::vector<double>(t, t + n));
    *out = new vg_trajectory{varigap::PLTrajectory(std::move(part), std::vector<double>(y, y + n))};
  });
}

vg_status vg_trajectory_analytic(const char* family, double a, double b, vg_trajectory** out) {
  VG_REQUIRE(family);
  VG_REQUIRE(out);
  return guard([&] {
    using varigap::AnalyticTrajectory;
    const std::string f = family;
    if (f == "sqrt") {
      *out = new vg_trajectory{AnalyticTrajectory::sqrt()};
    } else if (f == "power") {
      *out = new vg_trajectory{AnalyticTrajectory::power(a)};
    } else if (f == "affine") {
      *out = new vg_trajectory{AnalyticTrajectory::affine(a, b)};
    } else if (f == "constant") {
      *out = new vg_trajectory{AnalyticTrajectory::constant(a)};
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown analytic family '" + f + "'");
    }
  });
}

vg_status vg_trajectory_discretize(const vg_trajectory* y, size_t n, double grading,
                                   vg_trajectory** out) {
  VG_REQUIRE(y);
  VG_REQUIRE(out);
  return guard([&] {
    const auto* an = std::get_if<varigap::AnalyticTrajectory>(&y->impl);
    if (an == nullptr) throw Error(ErrorCode::InvalidArgument, "only analytic trajectories discretize");
    *out = new vg_trajectory{varigap::discretize(*an, n, grading)};
  });
}

int vg_trajectory_is_pl(const vg_trajectory* y) {
  return y != nullptr && std::holds_alternative<varigap::PLTrajectory>(y->impl) ? 1 : 0;
}

vg_status vg_trajectory_eval(const vg_trajectory* y, double t, double* out) {
  VG_REQUIRE(y);
  VG_REQUIRE(out);
  return guard([&] { *out = varigap::eval(y->impl, t); });
}

vg_status vg_trajectory_derivative(const vg_trajectory* y, double t, double* out) {
  VG_REQUIRE(y);
  VG_REQUIRE(out);
  return guard([&] { *out = varigap::derivative(y->impl, t); });
}

vg_status vg_trajectory_range(const vg_trajectory* y, double* alpha, double* beta) {
  VG_REQUIRE(y);
  VG_REQUIRE(alpha);
  VG_REQUIRE(beta);
  return guard([&] {
    const varigap::RangeBounds r = varigap::range_bounds(y->impl);
    *alpha = r.alpha;
    *beta = r.beta;
  });
}

vg_status vg_trajectory_to_json(const vg_trajectory* y, char** out) {
  VG_REQUIRE(y);
  VG_REQUIRE(out);
  return guard([&] { *out = dup_string(varigap::io::to_json(y->impl)); });
}

vg_status vg_sobolev_distance(const vg_trajectory* y1, const vg_trajectory* y2, double p,
                              const vg_quad_config* quad, double* out) {
  VG_REQUIRE(y1);
  VG_REQUIRE(y2);
  VG_REQUIRE(out);
  return guard([&] { *out = varigap::sobolev_distance(y1->impl, y2->impl, p, to_quad(quad)); });
}

void vg_trajectory_free(vg_trajectory* y) { delete y; }

vg_status vg_rho_new(const char* minus, const char* plus, vg_rho** out) {
  VG_REQUIRE(minus);
  VG_REQUIRE(plus);
  VG_REQUIRE(out);
  return guard([&] { *out = new vg_rho{varigap::RhoPair(minus, plus)}; });
}

vg_status vg_rho_from_json(const char* json, vg_rho** out) {
  VG_REQUIRE(json);
  VG_REQUIRE(out);
  return guard([&] { *out = new vg_rho{varigap::io::rho_from_json(json)}; });
}

vg_status vg_rho_eval(const vg_rho* rho, int side, double z, double* out) {
  VG_REQUIRE(rho);
  VG_REQUIRE(out);
  return guard([&] {
    if (side != 1 && side != -1) throw Error(ErrorCode::InvalidArgument, "side must be +1 or -1");
    *out = rho->impl.eval(side > 0 ? varigap::RhoSide::Plus : varigap::RhoSide::Minus, z);
  });
}

void vg_rho_free(vg_rho* rho) { delete rho; }

vg_status vg_energy(const vg_lagrangian* L, const vg_trajectory* y, const vg_quad_config* quad,
                    vg_energy_result* out, vg_format format, char** text) {
  VG_REQUIRE(L);
  VG_REQUIRE(y);
  return guard([&] {
    const varigap::EnergyResult r = varigap::energy(L->impl, y->impl, to_quad(quad));
    if (out != nullptr) {
      *out = vg_energy_result{r.value.to_double(), static_cast<vg_energy_status>(r.status),
                              r.lower_bound, r.segments_evaluated};
    }
    emit(r, format, text);
  });
}

vg_status vg_gap_certificate(const vg_trajectory* y, const vg_quad_config* quad, int terms,
                             int* divergent, vg_format format, char** text) {
  VG_REQUIRE(y);
  return guard([&] {
    const varigap::GapCertificate c = varigap::gap_certificate(require_pl(y), to_quad(quad), terms);
    if (divergent != nullptr) *divergent = c.verdict == varigap::CertificateVerdict::Divergent;
    if (text == nullptr) return;
    if (format == VG_FORMAT_SVG) {
      *text = dup_string(varigap::io::to_svg(c));
    } else {
      emit(c, format, text);
    }
  });
}

vg_status vg_divergence_consistency(const vg_trajectory* y, const vg_lagrangian* L,
                                    const vg_quad_config* quad, int* consistent, char** json) {
  VG_REQUIRE(y);
  VG_REQUIRE(L);
  return guard([&] {
    const varigap::DivergenceReport r =
        varigap::verify_divergence_consistency(require_pl(y), L->impl, to_quad(quad));
    if (consistent != nullptr) *consistent = r.consistent ? 1 : 0;
    if (json != nullptr) *json = dup_string(varigap::io::to_json(r));
  });
}

vg_status vg_check_R(const vg_lagrangian* L, const vg_rho* rho, double lo, double hi,
                     size_t samples, double cap, int* status, vg_format format, char** text) {
  VG_REQUIRE(L);
  VG_REQUIRE(rho);
  return guard([&] {
    emit_verdict(varigap::check_R(L->impl, rho->impl, {lo, hi}, samples, cap), status, format, text);
  });
}

vg_status vg_check_Ry(const vg_lagrangian* L, const vg_rho* rho, const vg_trajectory* y,
                      size_t samples, double cap, int* status, vg_format format, char** text) {
  VG_REQUIRE(L);
  VG_REQUIRE(rho);
  VG_REQUIRE(y);
  return guard([&] {
    emit_verdict(varigap::check_Ry(L->impl, rho->impl, y->impl, samples, cap), status, format,
                 text);
  });
}

vg_status vg_check_B(const vg_lagrangian* L, double K, double r, size_t samples_per_axis,
                     double cap, int* status, vg_format format, char** text) {
  VG_REQUIRE(L);
  return guard([&] {
    emit_verdict(varigap::check_B(L->impl, K, r, samples_per_axis, cap), status, format, text);
  });
}

vg_status vg_check_zero_speed(const vg_lagrangian* L, double lo, double hi, size_t samples,
                              double cap, int* status, vg_format format, char** text) {
  VG_REQUIRE(L);
  return guard([&] {
    emit_verdict(varigap::check_zero_speed(L->impl, {lo, hi}, samples, cap), status, format, text);
  });
}

vg_status vg_repair_sweep(const vg_trajectory* y, const vg_lagrangian* L, const vg_rho* rho,
                          const double* thresholds, size_t count, const vg_repair_options* options,
                          int* all_ok, int* all_finite, vg_format format, char** text) {
  VG_REQUIRE(y);
  VG_REQUIRE(L);
  VG_REQUIRE(rho);
  VG_REQUIRE(thresholds);
  return guard([&] {
    const vg_repair_options o = options != nullptr ? *options : vg_repair_options_default();
    varigap::RepairOptions ro;
    ro.p = o.p;
    ro.quad = to_quad(&o.quad);
    ro.mode = o.mode == VG_EXTENSION_CONSTANT ? varigap::ExtensionMode::Constant
                                              : varigap::ExtensionMode::Ode;
    ro.condition_samples = o.condition_samples;
    ro.rho_samples = o.rho_samples;
    const std::vector<double> Ms(thresholds, thresholds + count);
    const std::vector<varigap::RepairReport> reports =
        varigap::sweep(require_pl(y), L->impl, rho->impl, Ms, ro);
    bool ok = true, finite = true;
    for (const auto& r : reports) {
      ok = ok && r.all_ok;
      finite = finite && r.energy_w.value.is_finite();
    }
    if (all_ok != nullptr) *all_ok = ok ? 1 : 0;
    if (all_finite != nullptr) *all_finite = finite ? 1 : 0;
    emit(reports, format, text);
  });
}

}  // extern "C"
