#ifndef WISH_H
#define WISH_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WishStatus {
  WISH_STATUS_OK = 0,
  WISH_STATUS_NULL_POINTER = 1,
  WISH_STATUS_INVALID_UTF8 = 2,
  WISH_STATUS_PARSE_ERROR = 3,
  WISH_STATUS_INVALID_MODEL = 4,
  WISH_STATUS_INVALID_ARGUMENT = 5,
  WISH_STATUS_DIMENSION_MISMATCH = 6,
  WISH_STATUS_CAP_EXCEEDED = 7,
  WISH_STATUS_OUT_OF_RANGE = 8,
  WISH_STATUS_PANIC = 9,
} WishStatus;

typedef enum WishGuarantee {
  WISH_GUARANTEE_EXACT16X = 0,
  WISH_GUARANTEE_FACTOR16L = 1,
  WISH_GUARANTEE_LOWER_BOUND = 2,
} WishGuarantee;

/**
 * A parsed and binarized model.
 */
typedef struct WishModel WishModel;

/**
 * The outcome of one estimator run.
 */
typedef struct WishRun WishRun;

/**
 * Run parameters. Zero means "unset" for `t_override`, `jobs` and
 * `budget_nodes`; a non-positive `budget_seconds` means no time limit.
 */
typedef struct WishOptions {
  double delta;
  double alpha;
  size_t t_override;
  uint64_t seed;
  size_t jobs;
  uint64_t budget_nodes;
  double budget_seconds;
} WishOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Valid
 * until the next failing call on the same thread.
 */
const char *wish_last_error_message(void);

struct WishOptions wish_options_default(void);

/**
 * Parses a UAI `MARKOV` document and binarizes it.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WishStatus wish_model_from_uai(const char *text, struct WishModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`wish_model_from_uai`] not yet freed.
 */
void wish_model_free(struct WishModel *model);

/**
 * Number of bits after binarization; 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t wish_model_num_bits(const struct WishModel *model);

/**
 * Natural-log weight of the bit assignment `bits[0..len]` (each byte 0 or
 * 1). Zero-weight assignments give `-INFINITY`.
 *
 * # Safety
 * `model` must be a live handle, `bits` must point to `len` readable bytes
 * and `out` must be valid.
 */
enum WishStatus wish_model_log_weight(const struct WishModel *model,
                                      const uint8_t *bits,
                                      size_t len,
                                      double *out);

/**
 * Exact `ln Z` by enumeration, refusing models with more than `cap` bits.
 *
 * # Safety
 * `model` must be a live handle and `out` valid.
 */
enum WishStatus wish_oracle_log_z(const struct WishModel *model, size_t cap, double *out);

/**
 * Runs the estimator. `options` may be null for defaults.
 *
 * # Safety
 * `model` must be a live handle, `options` null or valid, `out` valid.
 */
enum WishStatus wish_run(const struct WishModel *model,
                         const struct WishOptions *options,
                         struct WishRun **out);

/**
 * # Safety
 * `run` must be null or a handle from [`wish_run`] not yet freed.
 */
void wish_run_free(struct WishRun *run);

/**
 * Natural-log estimate of `Z`; NaN for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
double wish_run_log_estimate(const struct WishRun *run);

/**
 * # Safety
 * `run` must be null or a live handle.
 */
enum WishGuarantee wish_run_guarantee(const struct WishRun *run);

/**
 * Number of medians, `n + 1`; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t wish_run_num_medians(const struct WishRun *run);

/**
 * Median `M_level` in natural log (`-INFINITY` for an empty level).
 *
 * # Safety
 * `run` must be a live handle and `out` valid.
 */
enum WishStatus wish_run_median(const struct WishRun *run, size_t level, double *out);

/**
 * JSON summary of the run, released with [`wish_string_free`].
 *
 * # Safety
 * `run` must be a live handle and `out` valid.
 */
enum WishStatus wish_run_to_json(const struct WishRun *run, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void wish_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WISH_H */
