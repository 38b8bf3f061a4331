#ifndef ANTICYCLO_H
#define ANTICYCLO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum AcStatus {
  AcStatus_Ok = 0,
  AcStatus_NullArgument = 1,
  AcStatus_InvalidInput = 2,
  AcStatus_Hypothesis = 3,
  AcStatus_Unsupported = 4,
  AcStatus_Verification = 5,
  AcStatus_OracleNonConvergence = 6,
  AcStatus_Cache = 7,
  AcStatus_Io = 8,
  AcStatus_Panic = 9,
} AcStatus;

/**
 * Opaque handle to a built pipeline.
 */
typedef struct AcPipeline AcPipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a pipeline for the curve with coefficients `curve[0..5]`, prime `p`,
 * field discriminant `disc`, levels up to `n_max` and precision `prec`.
 *
 * # Safety
 * `curve` must point to five readable integers and `out` must be writable.
 */
enum AcStatus ac_pipeline_new(const int64_t *curve,
                              uint64_t p,
                              int64_t disc,
                              uint32_t n_max,
                              uint32_t prec,
                              struct AcPipeline **out);

/**
 * # Safety
 * `pl` must come from [`ac_pipeline_new`] and not have been freed; null is ignored.
 */
void ac_pipeline_free(struct AcPipeline *pl);

/**
 * # Safety
 * `pl` must be a live pipeline and `out` writable.
 */
enum AcStatus ac_analyze_json(const struct AcPipeline *pl, char **out);

/**
 * Theta and L elements at level `n`.
 *
 * # Safety
 * `pl` must be a live pipeline and `out` writable.
 */
enum AcStatus ac_theta_json(const struct AcPipeline *pl, uint32_t n, char **out);

/**
 * Runs the invariant suite. Returns `Verification` if any check fails; the
 * report is written to `out` in either case.
 *
 * # Safety
 * `pl` must be a live pipeline and `out` writable.
 */
enum AcStatus ac_verify_json(const struct AcPipeline *pl, char **out);

/**
 * Interpolation report. `chars_json` is a JSON list of `{"n", "k"}` objects,
 * or null for the default list.
 *
 * # Safety
 * `pl` must be a live pipeline, `chars_json` null or a NUL-terminated string,
 * and `out` writable.
 */
enum AcStatus ac_report_json(const struct AcPipeline *pl, const char *chars_json, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void ac_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *ac_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTICYCLO_H */
