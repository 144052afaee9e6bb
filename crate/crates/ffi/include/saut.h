#ifndef SAUT_H
#define SAUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SautStatus {
  SAUT_STATUS_OK = 0,
  SAUT_STATUS_NULL_ARGUMENT = 1,
  SAUT_STATUS_INVALID_INPUT = 2,
  SAUT_STATUS_CAPACITY = 3,
  SAUT_STATUS_CHECKPOINT = 4,
  SAUT_STATUS_IO = 5,
  SAUT_STATUS_PARSE = 6,
  SAUT_STATUS_CONSISTENCY = 7,
  SAUT_STATUS_INTERRUPTED = 8,
  SAUT_STATUS_PANIC = 9,
} SautStatus;

/**
 * A permutation of `{0, ..., degree - 1}`.
 */
typedef struct SautPermutation SautPermutation;

/**
 * A configured search; run it with `saut_search_run`.
 */
typedef struct SautSearch SautSearch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failure on this thread, or null. Valid until the next call.
 */
const char *saut_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *saut_version(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void saut_string_free(char *s);

/**
 * Builds a permutation from its 0-based image array.
 *
 * # Safety
 * `images` must point to `len` readable values; `out` must be writable.
 */
enum SautStatus saut_permutation_new(const uint32_t *images,
                                     uintptr_t len,
                                     struct SautPermutation **out);

/**
 * # Safety
 * `p` must come from this library, or be null.
 */
void saut_permutation_free(struct SautPermutation *p);

/**
 * Degree of `p`, or 0 for a null handle.
 *
 * # Safety
 * `p` must be a live handle or null.
 */
uintptr_t saut_permutation_degree(const struct SautPermutation *p);

/**
 * Copies the image array into `buf`, which must hold at least the degree.
 *
 * # Safety
 * `buf` must point to `len` writable values.
 */
enum SautStatus saut_permutation_images(const struct SautPermutation *p,
                                        uint32_t *buf,
                                        uintptr_t len);

/**
 * `p` then `q`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_compose(const struct SautPermutation *p,
                                         const struct SautPermutation *q,
                                         struct SautPermutation **out);

/**
 * `g^-1 p g`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_conjugate(const struct SautPermutation *p,
                                           const struct SautPermutation *g,
                                           struct SautPermutation **out);

/**
 * `a b a^-1 b^-1`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_commutator(const struct SautPermutation *a,
                                            const struct SautPermutation *b,
                                            struct SautPermutation **out);

/**
 * # Safety
 * `p` must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_inverse(const struct SautPermutation *p,
                                         struct SautPermutation **out);

/**
 * # Safety
 * `p` must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_is_even(const struct SautPermutation *p, bool *out);

/**
 * Cycle notation such as `(0 3)(1 2 4)`.
 *
 * # Safety
 * `p` must be live; `out` must be writable.
 */
enum SautStatus saut_permutation_to_string(const struct SautPermutation *p, char **out);

/**
 * A search for rank `rank` over degrees `lo..=hi` with default settings.
 *
 * # Safety
 * `out` must be writable.
 */
enum SautStatus saut_search_new(uintptr_t rank,
                                uintptr_t lo,
                                uintptr_t hi,
                                struct SautSearch **out);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void saut_search_free(struct SautSearch *s);

/**
 * Worker threads; 0 restores the default.
 *
 * # Safety
 * `s` must be live.
 */
enum SautStatus saut_search_set_threads(struct SautSearch *s, uintptr_t threads);

/**
 * 0 = auto, 1 = on, 2 = off.
 *
 * # Safety
 * `s` must be live.
 */
enum SautStatus saut_search_set_injectivity(struct SautSearch *s, uint32_t mode);

/**
 * # Safety
 * `s` must be live.
 */
enum SautStatus saut_search_set_compatibility(struct SautSearch *s, bool on);

/**
 * # Safety
 * `s` must be live.
 */
enum SautStatus saut_search_set_early_stop(struct SautSearch *s, bool on);

/**
 * Checkpoint directory; null clears it.
 *
 * # Safety
 * `s` must be live; `dir` must be a nul-terminated string or null.
 */
enum SautStatus saut_search_set_checkpoint(struct SautSearch *s, const char *dir);

/**
 * Runs the search and returns the report as JSON.
 *
 * # Safety
 * `s` must be live; `report` must be writable.
 */
enum SautStatus saut_search_run(struct SautSearch *s, char **report);

/**
 * Continues a checkpointed search; `threads` 0 means the default.
 *
 * # Safety
 * `dir` must be a nul-terminated string; `report` must be writable.
 */
enum SautStatus saut_resume(const char *dir, uintptr_t threads, char **report);

/**
 * Checks a certificate given as JSON text. `check` (optional) receives the check as JSON.
 *
 * # Safety
 * `json` must be a nul-terminated string; `passed` must be writable; `check` may be null.
 */
enum SautStatus saut_verify_certificate_json(const char *json, bool *passed, char **check);

/**
 * The control certificate for the action on the nonzero vectors of `F_2^rank`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SautStatus saut_control_psl_json(uintptr_t rank, char **out);

/**
 * Checks every relation on the automorphisms of rank `rank`.
 *
 * # Safety
 * `checked` and `failures` must be writable.
 */
enum SautStatus saut_gersten_selftest(uintptr_t rank, uint64_t *checked, uint64_t *failures);

/**
 * The order-12 character of `[[a, b], [c, d]]` in `SL_2(Z)`, as an exponent mod 12.
 *
 * # Safety
 * `out` must be writable.
 */
enum SautStatus saut_chi(int64_t a, int64_t b, int64_t c, int64_t d, uint8_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAUT_H */
