/* C interface to the cayley mixed-graph integrality library. */

#ifndef CAYLEY_H
#define CAYLEY_H

/* Generated by cbindgen; edit build.rs / src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  CAYLEY_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CAYLEY_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CAYLEY_STATUS_INVALID_UTF8 = 2,
  /**
   * The group spec or set expression did not parse.
   */
  CAYLEY_STATUS_PARSE = 3,
  /**
   * The mask has bits outside the group's element range.
   */
  CAYLEY_STATUS_MASK_OUT_OF_RANGE = 4,
  /**
   * The caller's buffer is smaller than the group order.
   */
  CAYLEY_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * The exact spectrum contains irrational eigenvalues, so it cannot be
   * returned as integers; use the numeric spectrum instead.
   */
  CAYLEY_STATUS_IRRATIONAL = 6,
  /**
   * The numeric eigensolver failed to converge.
   */
  CAYLEY_STATUS_NUMERIC = 7,
  /**
   * The three decision routes disagreed (library defect; never expected).
   */
  CAYLEY_STATUS_DISAGREEMENT = 8,
  /**
   * An internal invariant failed.
   */
  CAYLEY_STATUS_INTERNAL = 9,
} CayleyStatus;

/**
 * Opaque handle to a parsed group with its classified representations.
 */
typedef struct CayleyGroup CayleyGroup;

/**
 * Integrality verdicts for one connection set, one per route.
 */
typedef struct {
  bool criteria;
  bool exact;
  bool numeric;
  bool agree;
} CayleyVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread.  The pointer
 * stays valid until the next failing call on the same thread.
 *
 * # Safety
 * The returned pointer must not be freed or used after a later FFI call
 * from the same thread fails.
 */
const char *cayley_last_error_message(void);

/**
 * Parses a group spec (e.g. `dihedral(8)`, `dicyclic(2x4; 0,2)`) into a
 * heap-allocated handle written to `out`.
 *
 * # Safety
 * `spec` must be NUL-terminated; `out` must point to writable memory for
 * one pointer.  The handle must be released with [`cayley_group_free`].
 */
CayleyStatus cayley_group_parse(const char *spec, CayleyGroup **out);

/**
 * Releases a handle returned by [`cayley_group_parse`].  Null is a no-op.
 *
 * # Safety
 * `handle` must be null or a pointer previously returned by
 * [`cayley_group_parse`] that has not been freed.
 */
void cayley_group_free(CayleyGroup *handle);

/**
 * Number of elements of the group, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
uint64_t cayley_group_order(const CayleyGroup *handle);

/**
 * Width of the connection-set bitmask (|G| − 1), or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
uint32_t cayley_group_mask_bits(const CayleyGroup *handle);

/**
 * Canonical spec string of the group; valid while the handle lives.
 *
 * # Safety
 * `handle` must be a live handle; the pointer must not outlive it.
 */
const char *cayley_group_spec(const CayleyGroup *handle);

/**
 * Parses a comma-separated set expression (`a,x*a^2`, tuples for
 * multi-factor groups) into a bitmask written to `out_mask`.
 *
 * # Safety
 * `handle` must be live, `expr` NUL-terminated, `out_mask` writable.
 */
CayleyStatus cayley_parse_set(const CayleyGroup *handle, const char *expr, uint64_t *out_mask);

/**
 * Decides integrality of the set encoded by `mask` via all three routes.
 *
 * # Safety
 * `handle` must be live and `out` writable for one `CayleyVerdict`.
 */
CayleyStatus cayley_check_mask(const CayleyGroup *handle, uint64_t mask, CayleyVerdict *out);

/**
 * Writes the exact integer spectrum (ascending, |G| values) into `buf`.
 * Fails with `Irrational` when any eigenvalue is not a rational integer.
 *
 * # Safety
 * `handle` must be live; `buf` must be writable for `len` values;
 * `out_written` (optional) for one value.
 */
CayleyStatus cayley_exact_spectrum(const CayleyGroup *handle,
                                   uint64_t mask,
                                   int64_t *buf,
                                   uintptr_t len,
                                   uintptr_t *out_written);

/**
 * Writes the numeric spectrum (ascending, |G| values) into `buf`.
 *
 * # Safety
 * `handle` must be live; `buf` must be writable for `len` values;
 * `out_written` (optional) for one value.
 */
CayleyStatus cayley_numeric_spectrum(const CayleyGroup *handle,
                                     uint64_t mask,
                                     double *buf,
                                     uintptr_t len,
                                     uintptr_t *out_written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAYLEY_H */
