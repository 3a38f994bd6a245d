#ifndef INEXACT_PGM_H
#define INEXACT_PGM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IpgmStatus {
  IPGM_STATUS_OK = 0,
  IPGM_STATUS_NULL_POINTER = 1,
  IPGM_STATUS_INVALID_ARGUMENT = 2,
  IPGM_STATUS_DIMENSION_MISMATCH = 3,
  IPGM_STATUS_INFEASIBLE = 4,
  IPGM_STATUS_DIVERGED = 5,
  IPGM_STATUS_OUT_OF_RANGE = 6,
  IPGM_STATUS_IO = 7,
  IPGM_STATUS_PARSE = 8,
  IPGM_STATUS_INTERNAL = 9,
} IpgmStatus;

// Proximal terms `h` understood by [`ipgm_prox`].
typedef enum IpgmProxKind {
  IPGM_PROX_KIND_ZERO = 0,
  // `weight · ‖x‖₁`
  IPGM_PROX_KIND_L1_NORM = 1,
  // Indicator of `‖x‖₁ ≤ radius`
  IPGM_PROX_KIND_L1_BALL = 2,
} IpgmProxKind;

// Rate curves understood by [`ipgm_bound`].
typedef enum IpgmCurve {
  IPGM_CURVE_THM2_NONCONVEX = 0,
  IPGM_CURVE_COR1_CONST = 1,
  IPGM_CURVE_COR1_FIXED_HORIZON = 2,
  IPGM_CURVE_CONVEX_IPGM = 3,
  IPGM_CURVE_CONVEX_IPGM_OPT_RHO = 4,
  IPGM_CURVE_FIPGM = 5,
  IPGM_CURVE_FIPGM_OPT_RHO = 6,
  IPGM_CURVE_HOLDER_RATE = 7,
} IpgmCurve;

// Opaque LogSum instance.
typedef struct IpgmLogSum IpgmLogSum;

// Opaque solver trace.
typedef struct IpgmTrace IpgmTrace;

// Curve parameters; NaN marks a parameter as unset.
typedef struct IpgmCurveParams {
  double lipschitz;
  double rho;
  double q;
  double delta;
  double delta0_gap;
  double radius;
  double beta;
  double zeta;
  double holder_constant;
  double nu;
  double horizon;
} IpgmCurveParams;

// Settings for [`ipgm_run_logsum`].
typedef struct IpgmRunConfig {
  // Degree `q ∈ [0, 1]`.
  double degree;
  // Gradient noise norm `Δ`; the certified accuracy is `Δ(2R)^{1-q}`.
  double noise_bound;
  // `ρ`; values `<= 0` select the instance's Lipschitz constant.
  double rho;
  double step_scale;
  size_t iterations;
  uint64_t seed;
  // 0 for plain runs, `m > 0` keeps the worst of `m` draws per step.
  size_t worst_case_directions;
} IpgmRunConfig;

// One iteration of a trace.
typedef struct IpgmRecord {
  size_t k;
  double f;
  double f_next;
  double gm_sq;
  double min_gm_sq;
  double alpha;
  double delta_k;
} IpgmRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null.
//
// The pointer stays valid until the next call into this library on the same thread.
const char *ipgm_last_error_message(void);

// Constant of the AM-GM split `δ r^q <= (qρ/2) r² + c`.
//
// # Safety
// `out` must be a valid pointer.
enum IpgmStatus ipgm_amgm_additive(double delta, double degree, double rho, double *out_value);

// `L(δ)` for a Hölder-smooth function with constant `H` and exponent `ν`.
//
// # Safety
// `out_value` must be a valid pointer.
enum IpgmStatus ipgm_holder_lipschitz(double holder_constant,
                                      double nu,
                                      double degree,
                                      double delta,
                                      double *out_value);

// Euclidean projection of `x` onto the ℓ1 ball of radius `radius`.
//
// # Safety
// `x` and `out_x` must point to `n` doubles; they may alias.
enum IpgmStatus ipgm_project_l1_ball(const double *x, size_t n, double radius, double *out_x);

// `prox_{γh}(x)` for the selected `h`; `param` is the weight or radius.
//
// # Safety
// `x` and `out_x` must point to `n` doubles; they may alias.
enum IpgmStatus ipgm_prox(enum IpgmProxKind kind,
                          double param,
                          double gamma,
                          const double *x,
                          size_t n,
                          double *out_x);

// Evaluates a rate curve at horizon `k`.
//
// # Safety
// `params` and `out_value` must be valid pointers.
enum IpgmStatus ipgm_bound(enum IpgmCurve curve,
                           const struct IpgmCurveParams *params,
                           double k,
                           double *out_value);

// Generates a LogSum instance with `n` unknowns and `big_n` data rows.
//
// # Safety
// `out_instance` must be a valid pointer; on success it receives a handle
// to release with [`ipgm_logsum_free`].
enum IpgmStatus ipgm_logsum_generate(size_t n,
                                     size_t big_n,
                                     double radius,
                                     double noise_level,
                                     uint64_t seed,
                                     struct IpgmLogSum **out_instance);

// # Safety
// `path` must be a NUL-terminated string and `out_instance` a valid pointer.
enum IpgmStatus ipgm_logsum_load(const char *path, struct IpgmLogSum **out_instance);

// # Safety
// `instance` must come from this library and `path` be a NUL-terminated string.
enum IpgmStatus ipgm_logsum_save(const struct IpgmLogSum *instance, const char *path);

// Number of unknowns, or 0 for a null handle.
//
// # Safety
// `instance` must be null or come from this library.
size_t ipgm_logsum_dim(const struct IpgmLogSum *instance);

// # Safety
// `instance` must come from this library and `out_value` be a valid pointer.
enum IpgmStatus ipgm_logsum_lipschitz(const struct IpgmLogSum *instance, double *out_value);

// Value and gradient at `x`.
//
// # Safety
// `x` and `out_gradient` must point to `n` doubles; `out_value` must be valid.
enum IpgmStatus ipgm_logsum_evaluate(const struct IpgmLogSum *instance,
                                     const double *x,
                                     size_t n,
                                     double *out_value,
                                     double *out_gradient);

// # Safety
// `instance` must be null or come from this library, and not be used afterwards.
void ipgm_logsum_free(struct IpgmLogSum *instance);

// Runs I-PGM from the origin over the instance's ℓ1 ball with a noisy
// gradient oracle and step `step_scale / (L + qρ)`.
//
// # Safety
// `instance` must come from this library, `config` and `out_trace` must be
// valid. The trace is released with [`ipgm_trace_free`].
enum IpgmStatus ipgm_run_logsum(const struct IpgmLogSum *instance,
                                const struct IpgmRunConfig *config,
                                struct IpgmTrace **out_trace);

// Number of completed iterations, or 0 for a null handle.
//
// # Safety
// `trace` must be null or come from this library.
size_t ipgm_trace_len(const struct IpgmTrace *trace);

// # Safety
// `trace` must come from this library and `out_record` be a valid pointer.
enum IpgmStatus ipgm_trace_record(const struct IpgmTrace *trace,
                                  size_t k,
                                  struct IpgmRecord *out_record);

// Copies `x_k` (`k` from 0 to the trace length inclusive) into `out_x`.
//
// # Safety
// `trace` must come from this library and `out_x` point to `n` doubles.
enum IpgmStatus ipgm_trace_iterate(const struct IpgmTrace *trace,
                                   size_t k,
                                   double *out_x,
                                   size_t n);

// # Safety
// `trace` must be null or come from this library, and not be used afterwards.
void ipgm_trace_free(struct IpgmTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INEXACT_PGM_H */
