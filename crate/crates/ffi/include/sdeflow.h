#ifndef SDEFLOW_H
#define SDEFLOW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdeflowStatus {
  SDEFLOW_STATUS_OK = 0,
  SDEFLOW_STATUS_NULL_POINTER = 1,
  SDEFLOW_STATUS_INVALID_UTF8 = 2,
  SDEFLOW_STATUS_CONFIG = 3,
  SDEFLOW_STATUS_INVALID_PARAMETER = 4,
  SDEFLOW_STATUS_DIMENSION_MISMATCH = 5,
  SDEFLOW_STATUS_NUMERICAL = 6,
  SDEFLOW_STATUS_IO = 7,
  SDEFLOW_STATUS_PANIC = 8,
} SdeflowStatus;

// Taming selector for [`sdeflow_integrate`].
typedef enum SdeflowTaming {
  SDEFLOW_TAMING_CLIP = 0,
  SDEFLOW_TAMING_RATIONAL = 1,
  SDEFLOW_TAMING_NONE = 2,
} SdeflowTaming;

// Opaque model handle: a validated scenario with a model section.
typedef struct SdeflowModel SdeflowModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *sdeflow_last_error(void);

// Library version as a static NUL-terminated string.
const char *sdeflow_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sdeflow_string_free(char *s);

// Parses a scenario TOML document that contains a `[model]` section.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum SdeflowStatus sdeflow_model_from_toml(const char *toml, struct SdeflowModel **out);

// Releases a model handle. Null is ignored.
//
// # Safety
// `model` must come from [`sdeflow_model_from_toml`] and not have been
// freed.
void sdeflow_model_free(struct SdeflowModel *model);

// State-space dimension, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
uintptr_t sdeflow_model_dim(const struct SdeflowModel *model);

// Integrates `n_points` initial points (row-major, `n_points * dim`
// doubles) over `n_steps` steps of size `dt` under the noise path of
// `seed`, writing terminal positions into `out` (same layout). Members
// that diverge are reported as NaN.
//
// # Safety
// `initials` and `out` must each hold `n_points * dim` doubles.
enum SdeflowStatus sdeflow_integrate(const struct SdeflowModel *model,
                                     uint64_t seed,
                                     double dt,
                                     uint64_t n_steps,
                                     const double *initials,
                                     uintptr_t n_points,
                                     enum SdeflowTaming taming,
                                     double *out);

// Constant bundle of the model as a JSON document. Free the result with
// [`sdeflow_string_free`].
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum SdeflowStatus sdeflow_constants_json(const struct SdeflowModel *model, char **out);

// Rate function `I(γ)` for chaining constants `c1`, `alpha` in dimension
// `d`.
//
// # Safety
// `out` must be writable.
enum SdeflowStatus sdeflow_rate_function(double gamma,
                                         double c1,
                                         double alpha,
                                         uintptr_t d,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDEFLOW_H */
