#ifndef RSRM_H
#define RSRM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RsrmStatus {
  RSRM_STATUS_OK = 0,
  RSRM_STATUS_NULL_POINTER = 1,
  RSRM_STATUS_INVALID_CONFIG = 2,
  RSRM_STATUS_DIMENSION = 3,
  RSRM_STATUS_PARSE = 4,
  RSRM_STATUS_RUNTIME = 5,
  RSRM_STATUS_PANIC = 6,
} RsrmStatus;

/**
 * Sensing scheme selector.
 */
typedef enum RsrmScheme {
  RSRM_SCHEME_FULL_GRM = 0,
  RSRM_SCHEME_BCS = 1,
  RSRM_SCHEME_BSRM = 2,
  RSRM_SCHEME_RSRM = 3,
} RsrmScheme;

typedef enum RsrmNormalization {
  RSRM_NORMALIZATION_RAW = 0,
  RSRM_NORMALIZATION_UNBIASED = 1,
} RsrmNormalization;

/**
 * Opaque operator handle.
 */
typedef struct RsrmOperator RsrmOperator;

/**
 * Operator parameters. `subrate` is `m / n`.
 */
typedef struct RsrmConfig {
  enum RsrmScheme scheme;
  size_t n;
  size_t block_size;
  double subrate;
  size_t passes;
  uint64_t seed_r;
  uint64_t seed_d;
  uint64_t seed_phi;
  enum RsrmNormalization normalization;
} RsrmConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with defaults for `scheme` and the seed triple derived from `master_seed`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `RsrmConfig`.
 */
enum RsrmStatus rsrm_config_init(struct RsrmConfig *out,
                                 enum RsrmScheme scheme,
                                 size_t n,
                                 size_t block_size,
                                 double subrate,
                                 uint64_t master_seed);

/**
 * Builds an operator. On success `*out` owns a new handle.
 *
 * # Safety
 * `config` must be null or valid; `out` must be null or writable.
 */
enum RsrmStatus rsrm_operator_new(const struct RsrmConfig *config, struct RsrmOperator **out);

/**
 * Loads an operator from its JSON document.
 *
 * # Safety
 * `json` must be null or a nul-terminated string; `out` must be null or writable.
 */
enum RsrmStatus rsrm_operator_from_json(const char *json, struct RsrmOperator **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `op` must be null or a handle not yet freed.
 */
void rsrm_operator_free(struct RsrmOperator *op);

/**
 * Writes the measurement count `m` and signal length `n`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum RsrmStatus rsrm_operator_dims(const struct RsrmOperator *op, size_t *rows, size_t *cols);

/**
 * `y = Φ x` with `x_len = n` and `y_len = m`.
 *
 * # Safety
 * `x` must hold `x_len` readable doubles and `y` `y_len` writable ones.
 */
enum RsrmStatus rsrm_operator_apply(const struct RsrmOperator *op,
                                    const double *x,
                                    size_t x_len,
                                    double *y,
                                    size_t y_len);

/**
 * `x = Φᵀ y` with `y_len = m` and `x_len = n`.
 *
 * # Safety
 * `y` must hold `y_len` readable doubles and `x` `x_len` writable ones.
 */
enum RsrmStatus rsrm_operator_adjoint(const struct RsrmOperator *op,
                                      const double *y,
                                      size_t y_len,
                                      double *x,
                                      size_t x_len);

/**
 * Serializes the operator. `*out` receives a string to release with `rsrm_string_free`.
 *
 * # Safety
 * `op` must be null or valid; `out` must be null or writable.
 */
enum RsrmStatus rsrm_operator_to_json(const struct RsrmOperator *op, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from `rsrm_operator_to_json` not yet freed.
 */
void rsrm_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *rsrm_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSRM_H */
