#ifndef HESSLAB_H
#define HESSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_VERIFICATION_FAILURE = 1,
  HL_STATUS_INVALID_INPUT = 2,
  HL_STATUS_INADMISSIBLE_PRIME = 3,
  HL_STATUS_NULL_POINTER = 4,
  HL_STATUS_INTERNAL = 5,
} HlStatus;

/**
 * Opaque Hessenberg vector.
 */
typedef struct HlHessenberg HlHessenberg;

/**
 * Opaque Jordan type.
 */
typedef struct HlJordanType HlJordanType;

/**
 * Opaque Poincaré polynomial in `t = q^2`.
 */
typedef struct HlPolynomial HlPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *hl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void hl_string_free(char *s);

/**
 * Parses a Jordan type such as `[[2,1],[1]] @ [0,5]`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_jordan_type_parse(const char *text, struct HlJordanType **out);

/**
 * # Safety
 * `t` must come from `hl_jordan_type_parse`, or be null.
 */
void hl_jordan_type_free(struct HlJordanType *t);

/**
 * # Safety
 * `t` must be a live handle.
 */
size_t hl_jordan_type_n(const struct HlJordanType *t);

/**
 * Parses `2,3,3` or one of `max`, `sing`, `full` resolved at size `n`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_hessenberg_parse(const char *text, size_t n, struct HlHessenberg **out);

/**
 * # Safety
 * `m` must come from `hl_hessenberg_parse`, or be null.
 */
void hl_hessenberg_free(struct HlHessenberg *m);

/**
 * Poincaré polynomial from the paving dimension count.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum HlStatus hl_poincare_tymoczko(const struct HlJordanType *t,
                                   const struct HlHessenberg *m,
                                   struct HlPolynomial **out);

/**
 * Closed-form Poincaré polynomial of `B(x, H(m_max))`.
 *
 * # Safety
 * `t` must be live; `out` must be writable.
 */
enum HlStatus hl_poincare_closed(const struct HlJordanType *t, struct HlPolynomial **out);

/**
 * # Safety
 * `p` must come from this library, or be null.
 */
void hl_polynomial_free(struct HlPolynomial *p);

/**
 * Number of stored coefficients (degree + 1; 0 for the zero polynomial).
 *
 * # Safety
 * `p` must be live.
 */
size_t hl_polynomial_len(const struct HlPolynomial *p);

/**
 * Coefficient of `t^k` (0 past the degree).
 *
 * # Safety
 * `p` must be live.
 */
int64_t hl_polynomial_coeff(const struct HlPolynomial *p, size_t k);

/**
 * Renders the polynomial in `t`, e.g. `1+2t+t²`.
 *
 * # Safety
 * `p` must be live; `out` must be writable.
 */
enum HlStatus hl_polynomial_to_string(const struct HlPolynomial *p, char **out);

/**
 * Counts `F_p`-points; the report is written as JSON. Inadmissible primes
 * fail with `InadmissiblePrime` unless `force` is nonzero.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum HlStatus hl_count_points(const struct HlJordanType *t,
                              const struct HlHessenberg *m,
                              uint64_t p,
                              int32_t force,
                              char **out);

/**
 * `det(A_g)` for matrices given as JSON rows (integers or `"a/b"`
 * strings), rendered like `z21*z32 - z31`.
 *
 * # Safety
 * Inputs must be NUL-terminated strings; `out` must be writable.
 */
enum HlStatus hl_patch_determinant(const char *x_json, const char *g_json, char **out);

/**
 * Bruhat-maximal components of the singular locus of `X_w`, as a JSON list
 * of one-line permutations.
 *
 * # Safety
 * `w` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_schubert_singular(const char *w, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HESSLAB_H */
