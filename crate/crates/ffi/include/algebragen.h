#ifndef ALGEBRAGEN_H
#define ALGEBRAGEN_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes. Positive values match the command-line exit codes.
 */
typedef enum AgStatus {
  AG_STATUS_OK = 0,
  AG_STATUS_PARSE = 2,
  AG_STATUS_NORM_BOUND = 3,
  AG_STATUS_NUMERIC = 4,
  AG_STATUS_OUT_OF_RANGE = 5,
  AG_STATUS_NULL_POINTER = -1,
  AG_STATUS_INVALID_UTF8 = -2,
  AG_STATUS_PANIC = -3,
} AgStatus;

/**
 * Opaque generator set.
 */
typedef struct AgGeneratorSet AgGeneratorSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses instance JSON. `field` may be null to use the file's field.
 *
 * # Safety
 * `json` and a non-null `field` must be NUL-terminated strings; `out` must
 * be a valid pointer. The handle is released with [`ag_generator_set_free`].
 */
enum AgStatus ag_generator_set_from_json(const char *json,
                                         const char *field,
                                         struct AgGeneratorSet **out);

/**
 * # Safety
 * `set` must be null or a handle from [`ag_generator_set_from_json`] not yet freed.
 */
void ag_generator_set_free(struct AgGeneratorSet *set);

/**
 * Matrix size `n`, or 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t ag_generator_set_size(const struct AgGeneratorSet *set);

/**
 * Dimension of the generated algebra.
 *
 * # Safety
 * `set` must be a live handle and `out_dim` a valid pointer.
 */
enum AgStatus ag_dimension(const struct AgGeneratorSet *set, size_t *out_dim);

/**
 * Membership of a candidate given as JSON (a grid or `{"matrix": grid}`).
 * `out_member` receives 1 or 0; `out_report`, if non-null, receives a JSON
 * report with the residual and optional certificate.
 *
 * # Safety
 * `set` must be a live handle, `candidate_json` a NUL-terminated string,
 * `out_member` valid, and `out_report` null or valid.
 */
enum AgStatus ag_membership_json(const struct AgGeneratorSet *set,
                                 const char *candidate_json,
                                 bool want_certificate,
                                 int32_t *out_member,
                                 char **out_report);

/**
 * Basis as JSON: `{"dimension": d, "basis": [grid, ...]}`.
 *
 * # Safety
 * `set` must be a live handle and `out_json` a valid pointer.
 */
enum AgStatus ag_basis_json(const struct AgGeneratorSet *set, char **out_json);

/**
 * Randomized exact dimension of a rational instance via random primes.
 * `out_failure_bound` may be null.
 *
 * # Safety
 * `instance_json` must be a NUL-terminated string, `out_dim` valid, and
 * `out_failure_bound` null or valid.
 */
enum AgStatus ag_modp_dimension(const char *instance_json,
                                size_t trials,
                                uint64_t seed,
                                size_t *out_dim,
                                double *out_failure_bound);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ag_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void ag_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALGEBRAGEN_H */
