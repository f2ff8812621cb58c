#ifndef AMO_H
#define AMO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Number of slots in [`AmoBounds`].
#define AMO_BOUND_COUNT 9

// Result code of every fallible call.
typedef enum AmoStatus {
  AMO_STATUS_OK = 0,
  AMO_STATUS_NULL_POINTER = 1,
  AMO_STATUS_INVALID_FRACTION = 2,
  AMO_STATUS_INVALID_ARGUMENT = 3,
  AMO_STATUS_NUMERICAL = 4,
  AMO_STATUS_INDEX_OUT_OF_RANGE = 5,
  AMO_STATUS_PANIC = 6,
} AmoStatus;

// Merged bands of one rational frequency.
typedef struct AmoBands AmoBands;

// Certification report.
typedef struct AmoReport AmoReport;

// Ascending eigenvalues of one twisted matrix.
typedef struct AmoSpectrum AmoSpectrum;

// Bound values at one `(theta, lambda)`, in the order reported by
// [`amo_bound_name`]. `present[i]` is false where bound `i` is not valid.
typedef struct AmoBounds {
  double theta;
  double lambda;
  double values[AMO_BOUND_COUNT];
  bool present[AMO_BOUND_COUNT];
} AmoBounds;

// Best trial-vector lower bound; `family` is 0, 1, 2 for x, y, z.
typedef struct AmoLower {
  double value;
  double alpha;
  double r;
  double a;
  double b;
  int32_t family;
} AmoLower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next `amo_*` call on the same thread.
const char *amo_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *amo_version(void);

// Static name of bound slot `index`, or NULL when out of range.
const char *amo_bound_name(uintptr_t index);

// Operator norm at `theta = p/q`.
//
// # Safety
// `out` must be NULL or valid for writing one `double`.
enum AmoStatus amo_norm_rational(uint64_t p, uint64_t q, double lambda, double *out);

// Closed-form bounds at `theta ∈ [0, 1/2]`.
//
// # Safety
// `out` must be NULL or valid for writing one `AmoBounds`.
enum AmoStatus amo_bounds(double theta, double lambda, struct AmoBounds *out);

// Best trial-vector lower bound at real `theta ∈ [0, 1/2]` (`λ = 2`).
//
// # Safety
// `out` must be NULL or valid for writing one `AmoLower`.
enum AmoStatus amo_lower_optimize(double theta, struct AmoLower *out);

// Eigenvalues at `theta = p/q` with twist `(phi, omega)`, `omega = ±1`.
//
// # Safety
// `out` must be NULL or valid for writing one pointer.
enum AmoStatus amo_spectrum_new(uint64_t p,
                                uint64_t q,
                                double lambda,
                                double phi,
                                int32_t omega,
                                struct AmoSpectrum **out);

// Number of eigenvalues; 0 for NULL.
//
// # Safety
// `h` must be NULL or a live handle from [`amo_spectrum_new`].
uintptr_t amo_spectrum_len(const struct AmoSpectrum *h);

// # Safety
// `h` must be NULL or a live handle; `out` NULL or writable.
enum AmoStatus amo_spectrum_get(const struct AmoSpectrum *h, uintptr_t index, double *out);

// # Safety
// `h` must be NULL or a handle from [`amo_spectrum_new`] not yet freed.
void amo_spectrum_free(struct AmoSpectrum *h);

// Merged band spectrum at `theta = p/q`.
//
// # Safety
// `out` must be NULL or valid for writing one pointer.
enum AmoStatus amo_bands_new(uint64_t p, uint64_t q, double lambda, struct AmoBands **out);

// Number of bands; 0 for NULL.
//
// # Safety
// `h` must be NULL or a live handle from [`amo_bands_new`].
uintptr_t amo_bands_len(const struct AmoBands *h);

// # Safety
// `h` must be NULL or a live handle; `lo` and `hi` NULL or writable.
enum AmoStatus amo_bands_get(const struct AmoBands *h, uintptr_t index, double *lo, double *hi);

// # Safety
// `h` must be NULL or a handle from [`amo_bands_new`] not yet freed.
void amo_bands_free(struct AmoBands *h);

// Sandwich sweep over `q ≤ q_max` and the given couplings. With
// `with_constants`, also reproduces the named constants and runs the
// Hölder check.
//
// # Safety
// `lambdas` must be valid for reading `n_lambdas` doubles (or NULL when
// `n_lambdas == 0`); `out` NULL or writable.
enum AmoStatus amo_certify_new(uint64_t q_max,
                               const double *lambdas,
                               uintptr_t n_lambdas,
                               bool with_constants,
                               struct AmoReport **out);

// # Safety
// `h` must be NULL or a live handle from [`amo_certify_new`].
uintptr_t amo_report_record_count(const struct AmoReport *h);

// # Safety
// `h` must be NULL or a live handle from [`amo_certify_new`].
uintptr_t amo_report_failure_count(const struct AmoReport *h);

// True when no record failed and every constant check passed; false for NULL.
//
// # Safety
// `h` must be NULL or a live handle from [`amo_certify_new`].
bool amo_report_passed(const struct AmoReport *h);

// The report as JSON; free with [`amo_string_free`]. NULL for a NULL handle.
//
// # Safety
// `h` must be NULL or a live handle from [`amo_certify_new`].
char *amo_report_json(const struct AmoReport *h);

// # Safety
// `h` must be NULL or a handle from [`amo_certify_new`] not yet freed.
void amo_report_free(struct AmoReport *h);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void amo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AMO_H */
