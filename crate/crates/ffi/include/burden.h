/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef BURDEN_H
#define BURDEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum BurdenStatus {
  BURDEN_STATUS_OK = 0,
  BURDEN_STATUS_NULL_POINTER = 1,
  BURDEN_STATUS_INVALID_ARGUMENT = 2,
  BURDEN_STATUS_VALIDATION = 3,
  BURDEN_STATUS_IO = 4,
  BURDEN_STATUS_ESTIMATION = 5,
  BURDEN_STATUS_BUFFER_TOO_SMALL = 6,
  BURDEN_STATUS_PANIC = 7,
} BurdenStatus;

// Opaque two-arm trial.
typedef struct BurdenTrial BurdenTrial;

typedef struct BurdenWald {
  double estimate;
  double se;
  double lower;
  double upper;
  double p_value;
} BurdenWald;

typedef struct BurdenAucResult {
  double auc_treated;
  double se_treated;
  double auc_control;
  double se_control;
  // Treated minus control.
  struct BurdenWald difference;
  // Zero when either arm's AUC is not positive; the ratio fields are then NaN.
  uint8_t ratio_available;
  double ratio;
  double ratio_lower;
  double ratio_upper;
  double ratio_p_value;
} BurdenAucResult;

typedef struct BurdenCoxResult {
  double beta;
  double se;
  double hazard_ratio;
  double lower;
  double upper;
  double p_value;
  size_t iterations;
} BurdenCoxResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *burden_last_error(void);

// Library version as a static nul-terminated string.
const char *burden_version(void);

// Loads a trial from a canonical wide CSV file.
//
// # Safety
// `path` must be a valid nul-terminated string and `out` a valid pointer.
enum BurdenStatus burden_trial_from_csv(const char *path, struct BurdenTrial **out);

// Builds a trial from row-major arrays: `times` and `events` hold
// `n_subjects * n_transitions` values, `arms` holds one `0`/`1` code per
// subject. `labels` may be null (generic names) or point to
// `n_transitions` strings in severity order with death last.
//
// # Safety
// Every non-null pointer must reference at least the stated number of elements.
enum BurdenStatus burden_trial_from_arrays(size_t n_subjects,
                                           size_t n_transitions,
                                           const uint8_t *arms,
                                           const double *times,
                                           const uint8_t *events,
                                           const char *const *labels,
                                           struct BurdenTrial **out);

// Releases a trial handle. Null is ignored.
//
// # Safety
// `trial` must come from this library and not be used afterwards.
void burden_trial_free(struct BurdenTrial *trial);

// Subject counts and number of transitions (`K + 1`).
//
// # Safety
// `trial` must be a live handle; output pointers must be valid.
enum BurdenStatus burden_trial_shape(const struct BurdenTrial *trial,
                                     size_t *n_treated,
                                     size_t *n_control,
                                     size_t *n_transitions);

// New handle keeping only the transitions at the given 0-based indices
// (strictly increasing, death last).
//
// # Safety
// `keep` must reference `n_keep` values; `out` must be valid.
enum BurdenStatus burden_trial_project(const struct BurdenTrial *trial,
                                       const size_t *keep,
                                       size_t n_keep,
                                       struct BurdenTrial **out);

// AUC of the mean cumulative score curve per arm, with difference and ratio.
//
// # Safety
// `trial` must be a live handle and `out` a valid pointer.
enum BurdenStatus burden_auc_contrast(const struct BurdenTrial *trial,
                                      double tau,
                                      double alpha,
                                      struct BurdenAucResult *out);

// Restricted mean time in favor of treatment with bootstrap inference.
// `stages` receives one entry per transition and must hold at least
// `K + 1` elements; it may be null when `stages_len` is 0.
//
// # Safety
// `trial` must be a live handle; `overall` valid; `stages` must reference
// `stages_len` elements.
enum BurdenStatus burden_rmtif(const struct BurdenTrial *trial,
                               double tau,
                               double alpha,
                               size_t replicates,
                               uint64_t seed,
                               struct BurdenWald *overall,
                               struct BurdenWald *stages,
                               size_t stages_len);

// Cox hazard ratio for time to the first event of any kind. `efron` selects
// Efron ties when nonzero, Breslow otherwise.
//
// # Safety
// `trial` must be a live handle and `out` a valid pointer.
enum BurdenStatus burden_cox_hr(const struct BurdenTrial *trial,
                                double alpha,
                                uint8_t efron,
                                struct BurdenCoxResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BURDEN_H */
