#ifndef SNMODES_H
#define SNMODES_H

/* Generated by cbindgen from snmodes-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Call outcome. Zero is success; anything else leaves outputs untouched.
 */
typedef enum SnmStatus {
  SNM_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  SNM_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8.
   */
  SNM_STATUS_INVALID_UTF8 = 2,
  /*
   JSON could not be parsed.
   */
  SNM_STATUS_PARSE_ERROR = 3,
  /*
   The record violated a field constraint.
   */
  SNM_STATUS_INVALID_SPEC = 4,
  /*
   An index or dimension was out of range.
   */
  SNM_STATUS_OUT_OF_RANGE = 5,
  /*
   The configuration has no stable harmonic expansion here.
   */
  SNM_STATUS_UNSTABLE = 6,
  /*
   Any other runtime failure; see `snm_last_error_message`.
   */
  SNM_STATUS_RUNTIME = 7,
} SnmStatus;

/*
 Opaque reduced solution, retaining the record it came from.
 */
typedef struct SnmSolution SnmSolution;

/*
 Opaque validated system record.
 */
typedef struct SnmSpec SnmSpec;

/*
 One distinct root of the reduced problem.
 */
typedef struct SnmRoot {
  /*
   Species digit: 0, 1, or 2.
   */
  int32_t species;
  /*
   Branch sign: +1, -1, or 0 for an untagged (scalar) root.
   */
  int32_t branch;
  /*
   Squared frequency.
   */
  double lambda;
  /*
   Frequency; NaN when `lambda < 0`.
   */
  double omega;
  /*
   Radial-angular mixing angle; NaN for scalar roots.
   */
  double theta;
  /*
   Normalization constant of the reduced coefficient vector.
   */
  double normalization;
  /*
   Number of modes sharing this root.
   */
  uint64_t multiplicity;
} SnmRoot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses and validates a system record from JSON.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SnmStatus snm_spec_parse(const char *json, struct SnmSpec **out);

/*
 Releases a record handle. Null is ignored.

 # Safety
 `spec` must come from [`snm_spec_parse`] and not have been freed.
 */
void snm_spec_free(struct SnmSpec *spec);

/*
 Reads the coordinate counts `N`, `P = N(N+1)/2`, `M = N(N-1)/2`.

 # Safety
 All pointers must be valid; `spec` must be a live handle.
 */
enum SnmStatus snm_spec_counts(const struct SnmSpec *spec, uint64_t *n, uint64_t *p, uint64_t *m);

/*
 Solves the reduced eigenproblems in closed form.

 # Safety
 `spec` must be a live handle and `out` a valid pointer.
 */
enum SnmStatus snm_solve(const struct SnmSpec *spec, struct SnmSolution **out);

/*
 Releases a solution handle. Null is ignored.

 # Safety
 `solution` must come from [`snm_solve`] and not have been freed.
 */
void snm_solution_free(struct SnmSolution *solution);

/*
 Number of distinct roots (5 for N >= 4, fewer for tiny systems).

 # Safety
 Pointers must be valid.
 */
enum SnmStatus snm_solution_root_count(const struct SnmSolution *solution, uint64_t *out);

/*
 Reads root `index` (0-based, ordered 0+, 0-, 1+, 1-, 2).

 # Safety
 Pointers must be valid.
 */
enum SnmStatus snm_solution_root(const struct SnmSolution *solution,
                                 uint64_t index,
                                 struct SnmRoot *out);

/*
 Serializes the full mode report (same document as the CLI `modes`).

 # Safety
 Pointers must be valid; release the string with [`snm_string_free`].
 */
enum SnmStatus snm_solution_to_json(const struct SnmSolution *solution, char **out);

/*
 Energy through first order for an occupancy JSON array
 (`[{"mu":"1+","n":1,"count":2}, ...]`; null means the ground state).

 # Safety
 Pointers must be valid.
 */
enum SnmStatus snm_energy(const struct SnmSolution *solution,
                          const char *occupancy_json,
                          double *out);

/*
 Zeroth-order wave-function value at `q` (length `len`, which must be
 `P`). Null `q` evaluates at the origin.

 # Safety
 `q` must point to `len` readable doubles when non-null.
 */
enum SnmStatus snm_phi0(const struct SnmSolution *solution,
                        const double *q,
                        uint64_t len,
                        const char *occupancy_json,
                        double *out);

/*
 Runs the dense verification suite. Writes 1 to `pass` when every check
 holds. When `report_json` is non-null it receives the full report (free
 with [`snm_string_free`]).

 # Safety
 Pointers must be valid.
 */
enum SnmStatus snm_verify(const struct SnmSpec *spec,
                          uint64_t seed,
                          int32_t *pass,
                          char **report_json);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must have been returned by this library and not already freed.
 */
void snm_string_free(char *s);

/*
 Thread-local description of the most recent failure on this thread.
 Valid until the next failing call; never null.
 */
const char *snm_last_error_message(void);

/*
 Library version as a static string.
 */
const char *snm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNMODES_H */
