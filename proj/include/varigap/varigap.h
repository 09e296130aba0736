/* C interface to the varigap library.
 *
 * Every function returns a vg_status. On failure the message of the last
 * error on the calling thread is available from vg_last_error(). Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with vg_string_free(). Handles are released with their _free
 * function; passing NULL to a _free function is a no-op.
 */
#ifndef VARIGAP_H
#define VARIGAP_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(VARIGAP_BUILDING)
#define VG_API __declspec(dllexport)
#else
#define VG_API __declspec(dllimport)
#endif
#else
#define VG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vg_status {
  VG_OK = 0,
  VG_ERR_INVALID_ARGUMENT = 1,
  VG_ERR_DOMAIN = 2,
  VG_ERR_PARSE = 3,
  VG_ERR_EVALUATION = 4,
  VG_ERR_NONNEGATIVITY = 5,
  VG_ERR_AMBIGUOUS_POINT = 6,
  VG_ERR_SINGULAR_ENDPOINT = 7,
  VG_ERR_PRECONDITION = 8,
  VG_ERR_CONDITION_SIGN = 9,
  VG_ERR_CONDITION_VIOLATED = 10,
  VG_ERR_TOLERANCE_NOT_MET = 11,
  VG_ERR_INTERNAL = 12,
  VG_ERR_NULL_ARGUMENT = 13
} vg_status;

typedef enum vg_format { VG_FORMAT_JSON = 0, VG_FORMAT_CSV = 1, VG_FORMAT_SVG = 2 } vg_format;

typedef enum vg_energy_status {
  VG_ENERGY_CONVERGED = 0,
  VG_ENERGY_DIVERGED = 1,
  VG_ENERGY_CAPPED = 2,
  VG_ENERGY_SINGULAR_ENDPOINT_LIMIT = 3
} vg_energy_status;

typedef enum vg_verdict_status {
  VG_VERDICT_NO_VIOLATION_FOUND = 0,
  VG_VERDICT_VIOLATION = 1,
  VG_VERDICT_INVALID_INPUT = 2
} vg_verdict_status;

typedef enum vg_extension_mode { VG_EXTENSION_ODE = 0, VG_EXTENSION_CONSTANT = 1 } vg_extension_mode;

typedef struct vg_lagrangian vg_lagrangian;
typedef struct vg_trajectory vg_trajectory;
typedef struct vg_rho vg_rho;

typedef struct vg_quad_config {
  double tol;
  double cap;
  int max_depth;
  double singular_split;
} vg_quad_config;

typedef struct vg_energy_result {
  double value; /* +inf when the energy diverged or was capped */
  vg_energy_status status;
  double lower_bound;
  size_t segments_evaluated;
} vg_energy_result;

typedef struct vg_repair_options {
  double p;
  vg_quad_config quad;
  vg_extension_mode mode;
  size_t condition_samples;
  size_t rho_samples;
} vg_repair_options;

VG_API const char* vg_version(void);
VG_API const char* vg_status_name(vg_status status);
VG_API const char* vg_last_error(void);
/* 1-based character position of the last parse error, 0 when not applicable. */
VG_API size_t vg_last_error_position(void);
VG_API void vg_string_free(char* s);

VG_API vg_quad_config vg_quad_config_default(void);
VG_API vg_repair_options vg_repair_options_default(void);

/* Lagrangians */
VG_API vg_status vg_lagrangian_builtin(const char* name, vg_lagrangian** out);
VG_API vg_status vg_lagrangian_parse(const char* expr, const char* state_var,
                                     const char* velocity_var, vg_lagrangian** out);
VG_API vg_status vg_lagrangian_from_json(const char* json, vg_lagrangian** out);
/* *out may be +inf. */
VG_API vg_status vg_lagrangian_eval(const vg_lagrangian* L, double y, double v, double* out);
VG_API void vg_lagrangian_free(vg_lagrangian* L);

/* Trajectories */
VG_API vg_status vg_trajectory_from_json(const char* json, vg_trajectory** out);
VG_API vg_status vg_trajectory_pl(const double* t, const double* y, size_t n, vg_trajectory** out);
/* family: "sqrt", "power" (a = gamma), "affine" (a = intercept, b = slope),
 * "constant" (a = value). Unused parameters are ignored. */
VG_API vg_status vg_trajectory_analytic(const char* family, double a, double b,
                                        vg_trajectory** out);
/* Interpolant on t_k = (k/n)^grading of an analytic trajectory. */
VG_API vg_status vg_trajectory_discretize(const vg_trajectory* y, size_t n, double grading,
                                          vg_trajectory** out);
VG_API int vg_trajectory_is_pl(const vg_trajectory* y);
VG_API vg_status vg_trajectory_eval(const vg_trajectory* y, double t, double* out);
VG_API vg_status vg_trajectory_derivative(const vg_trajectory* y, double t, double* out);
VG_API vg_status vg_trajectory_range(const vg_trajectory* y, double* alpha, double* beta);
VG_API vg_status vg_trajectory_to_json(const vg_trajectory* y, char** out);
VG_API vg_status vg_sobolev_distance(const vg_trajectory* y1, const vg_trajectory* y2, double p,
                                     const vg_quad_config* quad, double* out);
VG_API void vg_trajectory_free(vg_trajectory* y);

/* Slope fields */
VG_API vg_status vg_rho_new(const char* minus, const char* plus, vg_rho** out);
VG_API vg_status vg_rho_from_json(const char* json, vg_rho** out);
/* side: +1 for rho+, -1 for rho-. Sign failures return VG_ERR_CONDITION_SIGN. */
VG_API vg_status vg_rho_eval(const vg_rho* rho, int side, double z, double* out);
VG_API void vg_rho_free(vg_rho* rho);

/* Energy. `text` may be NULL; otherwise it receives the result in `format`
 * (JSON or CSV). `quad` may be NULL for defaults. */
VG_API vg_status vg_energy(const vg_lagrangian* L, const vg_trajectory* y,
                           const vg_quad_config* quad, vg_energy_result* out, vg_format format,
                           char** text);

/* Gap certificate of a piecewise-linear trajectory (JSON, CSV or SVG). */
VG_API vg_status vg_gap_certificate(const vg_trajectory* y, const vg_quad_config* quad, int terms,
                                    int* divergent, vg_format format, char** text);
VG_API vg_status vg_divergence_consistency(const vg_trajectory* y, const vg_lagrangian* L,
                                           const vg_quad_config* quad, int* consistent,
                                           char** json);

/* Condition checks; `status` receives a vg_verdict_status. */
VG_API vg_status vg_check_R(const vg_lagrangian* L, const vg_rho* rho, double lo, double hi,
                            size_t samples, double cap, int* status, vg_format format,
                            char** text);
VG_API vg_status vg_check_Ry(const vg_lagrangian* L, const vg_rho* rho, const vg_trajectory* y,
                             size_t samples, double cap, int* status, vg_format format,
                             char** text);
VG_API vg_status vg_check_B(const vg_lagrangian* L, double K, double r, size_t samples_per_axis,
                            double cap, int* status, vg_format format, char** text);
VG_API vg_status vg_check_zero_speed(const vg_lagrangian* L, double lo, double hi, size_t samples,
                                     double cap, int* status, vg_format format, char** text);

/* Repair pipeline over strictly increasing thresholds (JSON or CSV).
 * all_ok: every invariant check held; all_finite: every F(w) finite. */
VG_API vg_status vg_repair_sweep(const vg_trajectory* y, const vg_lagrangian* L, const vg_rho* rho,
                                 const double* thresholds, size_t count,
                                 const vg_repair_options* options, int* all_ok, int* all_finite,
                                 vg_format format, char** text);

#ifdef __cplusplus
}
#endif

#endif /* VARIGAP_H */
