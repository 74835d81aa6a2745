#ifndef HJ_RELAX_H
#define HJ_RELAX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HjStatus {
  HJ_STATUS_OK = 0,
  HJ_STATUS_NULL_POINTER = 1,
  /**
   * Zero denominator, index out of range, non-finite float.
   */
  HJ_STATUS_INVALID_ARGUMENT = 2,
  HJ_STATUS_INVALID_FUNCTION = 3,
  HJ_STATUS_INVALID_HAMILTONIAN = 4,
  HJ_STATUS_INVALID_BOUNDARY = 5,
  HJ_STATUS_NOT_SEMI_COERCIVE = 6,
  HJ_STATUS_UNBOUNDED = 7,
  /**
   * Two exact routes disagreed; this is a bug.
   */
  HJ_STATUS_INTERNAL_MISMATCH = 8,
  /**
   * A value does not fit in `i64 / i64`.
   */
  HJ_STATUS_OVERFLOW = 9,
  HJ_STATUS_BUFFER_TOO_SMALL = 10,
  HJ_STATUS_PANIC = 11,
} HjStatus;

/**
 * Opaque piecewise-linear function.
 */
typedef struct HjPl HjPl;

typedef struct HjRational {
  int64_t num;
  int64_t den;
} HjRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a function from `n` breakpoints `(xs[i], ys[i])` and its tail slopes.
 *
 * # Safety
 * `xs` and `ys` must point to `n` readable values; `out` must be writable.
 */
enum HjStatus hj_pl_new(const struct HjRational *xs,
                        const struct HjRational *ys,
                        size_t n,
                        struct HjRational slope_left,
                        struct HjRational slope_right,
                        struct HjPl **out);

/**
 * Copies a handle.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_pl_clone(const struct HjPl *f, struct HjPl **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void hj_pl_free(struct HjPl *f);

/**
 * Number of breakpoints in canonical form (at least one).
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_pl_breakpoint_count(const struct HjPl *f, size_t *out);

/**
 * # Safety
 * `f` must be a live handle; `x` and `y` must be writable.
 */
enum HjStatus hj_pl_breakpoint(const struct HjPl *f,
                               size_t i,
                               struct HjRational *x,
                               struct HjRational *y);

/**
 * # Safety
 * `f` must be a live handle; `left` and `right` must be writable.
 */
enum HjStatus hj_pl_slopes(const struct HjPl *f, struct HjRational *left, struct HjRational *right);

/**
 * Exact value at `p`.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_pl_eval(const struct HjPl *f, struct HjRational p, struct HjRational *out);

/**
 * Value at a float abscissa, rounded to the nearest double.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_pl_eval_f64(const struct HjPl *f, double p, double *out);

/**
 * Exact equality of canonical forms.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum HjStatus hj_pl_equal(const struct HjPl *a, const struct HjPl *b, bool *out);

/**
 * Writes the display form, NUL-terminated, into `buf`. `needed` receives the
 * size including the terminator, also when `cap` is too small.
 *
 * # Safety
 * `f` must be a live handle; `buf` must hold `cap` bytes (may be null if `cap == 0`).
 */
enum HjStatus hj_pl_format(const struct HjPl *f, char *buf, size_t cap, size_t *needed);

/**
 * Relaxation of the boundary function `f0` against the Hamiltonian `h`.
 *
 * # Safety
 * `h` and `f0` must be live handles; `out` must be writable.
 */
enum HjStatus hj_relax(const struct HjPl *h, const struct HjPl *f0, struct HjPl **out);

/**
 * # Safety
 * `h` and `f0` must be live handles; `out` must be writable.
 */
enum HjStatus hj_sub_relax(const struct HjPl *h, const struct HjPl *f0, struct HjPl **out);

/**
 * # Safety
 * `h` and `f0` must be live handles; `out` must be writable.
 */
enum HjStatus hj_super_relax(const struct HjPl *h, const struct HjPl *f0, struct HjPl **out);

/**
 * Plateau operator built from limiter points. With `strict`, a boundary
 * function whose left tail is flat is rejected instead of replaced by
 * `max(f0, H_-)`.
 *
 * # Safety
 * `h` and `f0` must be live handles; `out` must be writable.
 */
enum HjStatus hj_guerand(const struct HjPl *h,
                         const struct HjPl *f0,
                         bool strict,
                         struct HjPl **out);

/**
 * Godunov operator `p -> G(q*, p)` with `f0(q*) = G(q*, p)`.
 *
 * # Safety
 * `h` and `f0` must be live handles; `out` must be writable.
 */
enum HjStatus hj_godunov(const struct HjPl *h,
                         const struct HjPl *f0,
                         bool strict,
                         struct HjPl **out);

/**
 * Godunov flux `G(q, p)`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_godunov_flux(const struct HjPl *h,
                              struct HjRational q,
                              struct HjRational p,
                              struct HjRational *out);

/**
 * Relaxed Neumann condition `u_x = slope`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_neumann(const struct HjPl *h, struct HjRational slope, struct HjPl **out);

/**
 * Relaxed Dirichlet condition `u = g`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HjStatus hj_dirichlet(const struct HjPl *h, struct HjRational g, struct HjPl **out);

/**
 * Copies this thread's last error message into `buf`, as [`hj_pl_format`].
 *
 * # Safety
 * `buf` must hold `cap` bytes; `needed` may be null.
 */
enum HjStatus hj_last_error(char *buf, size_t cap, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HJ_RELAX_H */
