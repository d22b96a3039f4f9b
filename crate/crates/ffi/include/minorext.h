#ifndef MINOREXT_H
#define MINOREXT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MxScanMode {
  MX_SCAN_EXHAUSTIVE = 0,
  MX_SCAN_PRUNED = 1,
} MxScanMode;

/**
 * Result code of every fallible call.
 */
typedef enum MxStatus {
  MX_OK = 0,
  /**
   * A required pointer argument was null.
   */
  MX_ERR_NULL = 1,
  /**
   * Invalid parameters or input data.
   */
  MX_ERR_INPUT = 2,
  /**
   * The subset count overflows or exceeds the budget.
   */
  MX_ERR_BUDGET = 3,
  /**
   * Eigensolver non-convergence or another internal failure.
   */
  MX_ERR_INTERNAL = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  MX_ERR_PANIC = 5,
} MxStatus;

/**
 * Opaque symmetric matrix.
 */
typedef struct MxSymMatrix MxSymMatrix;

/**
 * Scalar part of a scan. The arg-sets are written to caller buffers.
 */
typedef struct MxScanResult {
  double t;
  double v;
  uint64_t subsets_visited;
  uint64_t subsets_pruned;
  size_t argmax_len;
  size_t argmin_len;
} MxScanResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies a row-major `dim × dim` matrix, which must be exactly symmetric.
 *
 * # Safety
 * `values` must point to `dim * dim` doubles and `out` must be writable.
 */
enum MxStatus mx_sym_matrix_from_values(const double *values, size_t dim, struct MxSymMatrix **out);

/**
 * Gram matrix `XᵀX` of a row-major `n × p` data matrix.
 *
 * # Safety
 * `data` must point to `n * p` doubles and `out` must be writable.
 */
enum MxStatus mx_sym_matrix_from_data(const double *data,
                                      size_t n,
                                      size_t p,
                                      struct MxSymMatrix **out);

/**
 * `(W − nI)/√n` as a new handle.
 *
 * # Safety
 * `w` must be a live handle and `out` must be writable.
 */
enum MxStatus mx_sym_matrix_center_scale(const struct MxSymMatrix *w,
                                         size_t n,
                                         struct MxSymMatrix **out);

/**
 * Seeded `p × p` Wigner matrix with diagonal variance `eta`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MxStatus mx_sym_matrix_wigner(size_t p,
                                   double eta,
                                   uint64_t master_seed,
                                   uint64_t stream_id,
                                   struct MxSymMatrix **out);

/**
 * Dimension of `w`, or 0 for a null handle.
 *
 * # Safety
 * `w` must be null or a live handle.
 */
size_t mx_sym_matrix_dim(const struct MxSymMatrix *w);

/**
 * Copies the row-major entries of `w` into `out`, which holds `len` doubles.
 *
 * # Safety
 * `w` must be a live handle and `out` must have room for `len` doubles.
 */
enum MxStatus mx_sym_matrix_values(const struct MxSymMatrix *w, double *out, size_t len);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void mx_sym_matrix_free(struct MxSymMatrix *w);

/**
 * Scans the principal minors of `w` of size `m` (or every size up to `m`
 * when `le_m` is true). `budget == 0` means unlimited. The arg-sets are
 * written to `argmax` and `argmin`, each with room for `capacity` indices;
 * `capacity >= m` always suffices.
 *
 * # Safety
 * `w` must be a live handle, `out` writable, and the index buffers must
 * hold `capacity` elements each.
 */
enum MxStatus mx_scan(const struct MxSymMatrix *w,
                      size_t m,
                      bool le_m,
                      enum MxScanMode mode,
                      size_t workers,
                      uint64_t budget,
                      struct MxScanResult *out,
                      size_t *argmax,
                      size_t *argmin,
                      size_t capacity);

/**
 * Eigenvalues of a row-major symmetric `dim × dim` matrix, in descending
 * order, written to `eigenvalues` (`dim` doubles).
 *
 * # Safety
 * `values` must hold `dim * dim` doubles and `eigenvalues` `dim` doubles.
 */
enum MxStatus mx_sym_eigs(const double *values, size_t dim, double *eigenvalues);

/**
 * Gaussian Gram envelope `2√(m log p / n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MxStatus mx_envelope_gaussian(size_t n, size_t p, size_t m, double *out);

/**
 * Gram envelope for entries with `Var(x²) = eta`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MxStatus mx_envelope_general(size_t n, size_t p, size_t m, double eta, double *out);

/**
 * Wigner envelope on the absolute scale.
 *
 * # Safety
 * `out` must be writable.
 */
enum MxStatus mx_envelope_wigner(size_t p, size_t m, double eta, double *out);

/**
 * Sparse Riesz constants `(c1, c2)` of a row-major `n × p` design at
 * sparsity `m`. `divisor == 0` divides by `n`.
 *
 * # Safety
 * `data` must hold `n * p` doubles; `c1` and `c2` must be writable.
 */
enum MxStatus mx_src_certificate(const double *data,
                                 size_t n,
                                 size_t p,
                                 size_t m,
                                 size_t divisor,
                                 size_t workers,
                                 double *c1,
                                 double *c2);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *mx_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mx_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINOREXT_H */
