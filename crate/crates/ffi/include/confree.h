#ifndef CONFREE_H
#define CONFREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ConfreeStatus {
  CONFREE_STATUS_OK = 0,
  CONFREE_STATUS_NULL_POINTER = 1,
  CONFREE_STATUS_INVALID_UTF8 = 2,
  CONFREE_STATUS_ARGUMENT = 3,
  CONFREE_STATUS_SYNTAX = 4,
  CONFREE_STATUS_UNKNOWN_LETTER = 5,
  CONFREE_STATUS_STEP_LIMIT = 6,
  CONFREE_STATUS_CYCLE = 7,
  CONFREE_STATUS_WINDOW = 8,
  CONFREE_STATUS_STRUCTURE = 9,
  CONFREE_STATUS_INTERNAL = 10,
} ConfreeStatus;

/*
 Coefficient algebra of the free associative conformal algebra.
 */
typedef struct ConfreeAssoc ConfreeAssoc;

/*
 Coefficient algebra of the free Lie conformal algebra.
 */
typedef struct ConfreeLie ConfreeLie;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *confree_last_error(void);

/*
 Library version as a static string.
 */
const char *confree_version(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void confree_string_free(char *s);

/*
 Creates a Lie context over the comma separated `letters` with constant locality `n`.

 # Safety
 `letters` must be a NUL terminated string and `out` writable.
 */
enum ConfreeStatus confree_lie_new(const char *letters, uint32_t n, struct ConfreeLie **out);

/*
 # Safety
 `h` must be null or a live handle from `confree_lie_new`.
 */
void confree_lie_free(struct ConfreeLie *h);

/*
 Normal form of `poly` in U(L).

 # Safety
 `h` must be a live handle, `poly` NUL terminated and `out` writable.
 */
enum ConfreeStatus confree_lie_reduce(const struct ConfreeLie *h, const char *poly, char **out);

/*
 Image of `poly` in the vertex algebra V = U(L)/U(L)L+.

 # Safety
 `h` must be a live handle, `poly` NUL terminated and `out` writable.
 */
enum ConfreeStatus confree_lie_project(const struct ConfreeLie *h, const char *poly, char **out);

/*
 Checks every ambiguity with indices in `lo..=hi`.

 # Safety
 `h` must be a live handle; `ambiguities` and `failures` writable.
 */
enum ConfreeStatus confree_lie_confluence(const struct ConfreeLie *h,
                                          int64_t lo,
                                          int64_t hi,
                                          size_t *ambiguities,
                                          size_t *failures);

/*
 Creates an associative context with constant locality `n`.

 # Safety
 `letters` must be a NUL terminated string and `out` writable.
 */
enum ConfreeStatus confree_assoc_new(const char *letters, uint32_t n, struct ConfreeAssoc **out);

/*
 Creates an associative context from a locality function in JSON,
 `{"constant": N}` or `{"pairs": {"a,b": 2, ...}}`.

 # Safety
 `letters` and `locality_json` must be NUL terminated and `out` writable.
 */
enum ConfreeStatus confree_assoc_new_json(const char *letters,
                                          const char *locality_json,
                                          struct ConfreeAssoc **out);

/*
 # Safety
 `h` must be null or a live handle from `confree_assoc_new*`.
 */
void confree_assoc_free(struct ConfreeAssoc *h);

/*
 Normal form of `poly` in A.

 # Safety
 `h` must be a live handle, `poly` NUL terminated and `out` writable.
 */
enum ConfreeStatus confree_assoc_reduce(const struct ConfreeAssoc *h, const char *poly, char **out);

/*
 # Safety
 `h` must be a live handle; `ambiguities` and `failures` writable.
 */
enum ConfreeStatus confree_assoc_confluence(const struct ConfreeAssoc *h,
                                            int64_t lo,
                                            int64_t hi,
                                            size_t *ambiguities,
                                            size_t *failures);

/*
 Number of basis words of A of length `l` and index sum `k`.

 # Safety
 `h` must be a live handle and `out` writable.
 */
enum ConfreeStatus confree_assoc_dim(const struct ConfreeAssoc *h,
                                     int64_t k,
                                     size_t l,
                                     uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONFREE_H */
