#ifndef CLUSTER_GEOM_H
#define CLUSTER_GEOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum CgStatus {
  CG_OK = 0,
  CG_NULL_POINTER = 1,
  CG_INVALID_INPUT = 2,
  CG_FROZEN_INDEX = 3,
  CG_UNSUPPORTED = 4,
  CG_LAURENT_VIOLATION = 5,
  CG_OVERFLOW = 6,
  CG_BUFFER_TOO_SMALL = 7,
  CG_INTERNAL = 99,
} CgStatus;

/**
 * Side of the cluster ensemble for `cg_laurent_check`.
 */
typedef enum CgSide {
  CG_SIDE_A = 0,
  CG_SIDE_X = 1,
} CgSide;

/**
 * Opaque seed handle.
 */
typedef struct CgSeed CgSeed;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a seed file (the CLI JSON format) into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CgStatus cg_seed_from_json(const char *json, struct CgSeed **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `seed` must come from this library and not be used afterwards.
 */
void cg_seed_free(struct CgSeed *seed);

/**
 * # Safety
 * `seed` and `out` must be valid pointers.
 */
enum CgStatus cg_seed_rank(const struct CgSeed *seed, size_t *out);

/**
 * Mutates in direction `k` (0-based) into a new handle.
 *
 * # Safety
 * `seed` and `out` must be valid pointers.
 */
enum CgStatus cg_seed_mutate(const struct CgSeed *seed, size_t k, struct CgSeed **out);

/**
 * Writes the exchange matrix row-major into `buf`, which must hold rank^2 entries.
 *
 * # Safety
 * `buf` must point to `len` writable `int64_t`.
 */
enum CgStatus cg_seed_epsilon(const struct CgSeed *seed, int64_t *buf, size_t len);

/**
 * Serializes the seed in the CLI JSON format (1-based indices).
 *
 * # Safety
 * `seed` and `out` must be valid pointers; free the result with `cg_string_free`.
 */
enum CgStatus cg_seed_to_json(const struct CgSeed *seed, char **out);

/**
 * Picard group report as JSON.
 *
 * # Safety
 * `seed` and `out` must be valid pointers; free the result with `cg_string_free`.
 */
enum CgStatus cg_picard_json(const struct CgSeed *seed, char **out);

/**
 * Rank-two report for `{"w": ..., "nu": ...}` data, checked on all single mutations.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CgStatus cg_rank2_report_json(const char *json, char **out);

/**
 * Checks that z^q stays Laurent along every mutation path up to `depth`.
 * Returns `CgLaurentViolation` when a non-Laurent transport is found.
 *
 * # Safety
 * `q` must point to `q_len` readable `int64_t`.
 */
enum CgStatus cg_laurent_check(const struct CgSeed *seed,
                               enum CgSide side,
                               const int64_t *q,
                               size_t q_len,
                               size_t depth);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cg_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until the next call.
 */
const char *cg_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLUSTER_GEOM_H */
