#ifndef FORCINGLAB_H
#define FORCINGLAB_H

/* Generated by cbindgen from forcinglab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum FlabStatus {
  /**
   * Success; for `flab_verify_certificate` this means the certificate was
   * accepted.
   */
  FlabStatusOk = 0,
  /**
   * A required pointer argument was null.
   */
  FlabStatusNullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  FlabStatusInvalidUtf8 = 2,
  /**
   * A tournament code or certificate failed to parse.
   */
  FlabStatusParseError = 3,
  /**
   * An unknown catalog or matrix name.
   */
  FlabStatusUnknownName = 4,
  /**
   * A size bound was violated (pattern/host/order limits).
   */
  FlabStatusBounds = 5,
  /**
   * The requested check ran but the claim was not established.
   */
  FlabStatusRejected = 6,
  /**
   * An internal invariant failed.
   */
  FlabStatusInternalError = 7,
} FlabStatus;

/**
 * Opaque tournament handle; create with `flab_tournament_parse` or
 * `flab_tournament_from_catalog`, release with `flab_tournament_free`.
 */
typedef struct FlabTournament FlabTournament;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the library version as a static string; do not free it.
 */
const char *flab_version(void);

/**
 * Parses an upper-triangle code such as "0010,001,00,0" into a handle.
 *
 * # Safety
 * `code` must be NUL-terminated; `out` must be a valid pointer.
 */
enum FlabStatus flab_tournament_parse(const char *code, struct FlabTournament **out);

/**
 * Resolves a catalog name such as "S_7", "H_6^9" or "T_4" into a handle.
 *
 * # Safety
 * `name` must be NUL-terminated; `out` must be a valid pointer.
 */
enum FlabStatus flab_tournament_from_catalog(const char *name, struct FlabTournament **out);

/**
 * Releases a tournament handle; null is a no-op.
 *
 * # Safety
 * `t` must have been produced by this library and not freed before.
 */
void flab_tournament_free(struct FlabTournament *t);

/**
 * Releases a string produced by this library; null is a no-op.
 *
 * # Safety
 * `s` must have been produced by this library and not freed before.
 */
void flab_string_free(char *s);

/**
 * Number of vertices, or -1 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
int32_t flab_tournament_order(const struct FlabTournament *t);

/**
 * 1 if transitive, 0 if not, -1 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
int32_t flab_tournament_is_transitive(const struct FlabTournament *t);

/**
 * 1 if strongly connected, 0 if not, -1 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
int32_t flab_tournament_is_strongly_connected(const struct FlabTournament *t);

/**
 * 1 if some pair of vertices are twins, 0 if not, -1 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
int32_t flab_tournament_has_twins(const struct FlabTournament *t);

/**
 * Writes the automorphism count (tournaments up to 10 vertices).
 *
 * # Safety
 * `t` must be a live handle; `out` must be a valid pointer.
 */
enum FlabStatus flab_tournament_automorphism_count(const struct FlabTournament *t, uint64_t *out);

/**
 * Writes the upper-triangle code of the handle's labeling.
 *
 * # Safety
 * `t` must be a live handle; `out` receives a string to free with
 * `flab_string_free`.
 */
enum FlabStatus flab_tournament_code(const struct FlabTournament *t, char **out);

/**
 * Writes the lexicographically minimal code over all relabelings
 * (tournaments up to 8 vertices).
 *
 * # Safety
 * `t` must be a live handle; `out` receives a string to free with
 * `flab_string_free`.
 */
enum FlabStatus flab_tournament_canonical_code(const struct FlabTournament *t, char **out);

/**
 * Writes the number of induced copies of `pattern` in `host`.
 *
 * # Safety
 * Both handles must be live; `out` must be a valid pointer.
 */
enum FlabStatus flab_count_copies(const struct FlabTournament *pattern,
                                  const struct FlabTournament *host,
                                  uint64_t *out);

/**
 * Writes the expected density of the pattern in a uniformly random
 * tournament as a reduced fraction string.
 *
 * # Safety
 * `t` must be a live handle; `out` receives a string to free with
 * `flab_string_free`.
 */
enum FlabStatus flab_expected_density(const struct FlabTournament *t, char **out);

/**
 * Writes d*(pattern, matrix) as a polynomial string for matrix name "A_x",
 * "B_x" or "C_x".
 *
 * # Safety
 * `t` must be a live handle; `matrix` NUL-terminated; `out` receives a
 * string to free with `flab_string_free`.
 */
enum FlabStatus flab_density_polynomial(const struct FlabTournament *t,
                                        const char *matrix,
                                        char **out);

/**
 * Runs the full classification for n = 5 or n = 6 and writes it as a JSON
 * document with `rows` and `certificates` arrays.
 *
 * # Safety
 * `out` receives a string to free with `flab_string_free`.
 */
enum FlabStatus flab_classify(uint32_t n, char **out);

/**
 * Re-checks one certificate JSON object from scratch. Returns
 * `FLAB_STATUS_OK` when accepted and `FLAB_STATUS_REJECTED` when the
 * recomputation disagrees; when `trace` is non-null it receives the
 * verification trace (free with `flab_string_free`).
 *
 * # Safety
 * `json` must be NUL-terminated; `trace` may be null.
 */
enum FlabStatus flab_verify_certificate(const char *json, char **trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORCINGLAB_H */
