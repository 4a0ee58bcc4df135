#ifndef ISOBARY_H
#define ISOBARY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of every call. Zero is success; everything else identifies the
 * failure class, mirroring the library's error type.
 */
typedef enum {
  ISOBARY_STATUS_OK = 0,
  ISOBARY_STATUS_OUT_OF_DOMAIN = 1,
  ISOBARY_STATUS_CAP_EXCEEDED = 2,
  ISOBARY_STATUS_PRECONDITION = 3,
  ISOBARY_STATUS_EMPTY_SLICE = 4,
  ISOBARY_STATUS_INVALID_HALFSPACE = 5,
  ISOBARY_STATUS_TARGET_OUT_OF_RANGE = 6,
  ISOBARY_STATUS_NO_CONVERGENCE = 7,
  ISOBARY_STATUS_PARSE = 8,
  ISOBARY_STATUS_IO = 9,
  ISOBARY_STATUS_NULL_POINTER = 10,
  ISOBARY_STATUS_PANIC = 11,
} IsobaryStatus;

/**
 * Opaque distribution handle created by `isobary_tail_new`.
 */
typedef struct IsobaryTail IsobaryTail;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Allocates the mean-of-n-uniforms distribution. On success writes the
 * handle to `out`; release it with `isobary_tail_free`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
IsobaryStatus isobary_tail_new(uint32_t n, IsobaryTail **out);

/**
 * Releases a handle. Null is a no-op.
 *
 * # Safety
 * `handle` must be null or a pointer returned by `isobary_tail_new`
 * that has not been freed already.
 */
void isobary_tail_free(IsobaryTail *handle);

/**
 * P(mean > t) at t = t_num/t_den, as the nearest double.
 *
 * # Safety
 * `handle` must be null or a live handle; `out` must be null or valid
 * for writing one double.
 */
IsobaryStatus isobary_tail_eval(const IsobaryTail *handle,
                                int64_t t_num,
                                int64_t t_den,
                                double *out);

/**
 * E[mean | mean > t], as the nearest double.
 *
 * # Safety
 * `handle` must be null or a live handle; `out` must be null or valid
 * for writing one double.
 */
IsobaryStatus isobary_tail_mean(const IsobaryTail *handle,
                                int64_t t_num,
                                int64_t t_den,
                                double *out);

/**
 * D(t) = (m(t) - t)·m(t) / (1 - m(t)²), as the nearest double.
 *
 * # Safety
 * `handle` must be null or a live handle; `out` must be null or valid
 * for writing one double.
 */
IsobaryStatus isobary_tail_derived(const IsobaryTail *handle,
                                   int64_t t_num,
                                   int64_t t_den,
                                   double *out);

/**
 * (1/n)·ln p(t) - (1/2)·ln(1 - m(t)²); negative iff the diagonal gap
 * inequality holds at t.
 *
 * # Safety
 * `handle` must be null or a live handle; `out` must be null or valid
 * for writing one double.
 */
IsobaryStatus isobary_tail_diag_gap(const IsobaryTail *handle,
                                    int64_t t_num,
                                    int64_t t_den,
                                    double *out);

/**
 * Exact volume fraction and barycenter of [-1,1]^dim ∩ {⟨w,u⟩ >= c}.
 * `direction` need not be normalized; `out_barycenter` must hold `dim`
 * doubles. The doubles are read exactly (they are binary fractions), so
 * the statistics are exact for the halfspace the caller's bits denote.
 *
 * # Safety
 * `direction` must be null or point to `dim` readable doubles;
 * `out_volume_fraction` must be null or valid for one double;
 * `out_barycenter` must be null or valid for `dim` doubles.
 */
IsobaryStatus isobary_slice_stats(uint32_t dim,
                                  const double *direction,
                                  double offset,
                                  double *out_volume_fraction,
                                  double *out_barycenter);

/**
 * Finds the halfspace whose slice of [-1,1]^dim has barycenter `target`.
 * Writes the unit direction (`dim` doubles), offset, and achieved
 * residual; `out_agreement` reports whether all solver starts landed on
 * the same halfspace.
 *
 * # Safety
 * `target` must be null or point to `dim` readable doubles;
 * `out_direction` must be null or valid for `dim` doubles; the other
 * out-pointers must be null or valid for one value each.
 */
IsobaryStatus isobary_solve(uint32_t dim,
                            const double *target,
                            double *out_direction,
                            double *out_offset,
                            double *out_residual,
                            bool *out_agreement);

/**
 * Offset t of the diagonal slice {mean(u) >= t} of [-1,1]^n whose
 * barycenter is m·(1,..,1), with m = m_num/m_den in (-1,1)\{0}. The
 * returned t is the nearest double to the solved offset.
 *
 * # Safety
 * `out_t` must be null or valid for writing one double.
 */
IsobaryStatus isobary_diagonal_offset(uint32_t n, int64_t m_num, int64_t m_den, double *out_t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOBARY_H */
