/* C ABI for the skelkit matrix skeletonization toolkit. */

#ifndef SKELKIT_H
#define SKELKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_INVALID_ARGUMENT = 2,
  SK_STATUS_DIMENSION_MISMATCH = 3,
  SK_STATUS_RANK_DEFICIENT = 4,
  SK_STATUS_SINGULAR = 5,
  SK_STATUS_INSTABILITY = 6,
  SK_STATUS_FORMAT_ERROR = 7,
  SK_STATUS_CONFIG_ERROR = 8,
  SK_STATUS_BUDGET_EXCEEDED = 9,
  SK_STATUS_IO_ERROR = 10,
  SK_STATUS_UTF8_ERROR = 11,
  SK_STATUS_BUFFER_TOO_SMALL = 12,
  SK_STATUS_NOT_AVAILABLE = 13,
  SK_STATUS_PANIC = 14,
} SkStatus;

// Skeleton selection algorithm.
typedef enum SkAlgorithm {
  SK_ALGORITHM_RAND_LUPP = 0,
  SK_ALGORITHM_RAND_LUPP1PITER = 1,
  SK_ALGORITHM_RAND_CPQR = 2,
  SK_ALGORITHM_RAND_CPQR1PITER = 3,
  SK_ALGORITHM_RSVD_DEIM = 4,
  SK_ALGORITHM_RSVD_LS = 5,
  SK_ALGORITHM_STREAMING_LUPP = 6,
  SK_ALGORITHM_STREAMING_CPQR = 7,
} SkAlgorithm;

// Error norm for evaluations.
typedef enum SkNorm {
  SK_NORM_FROBENIUS = 0,
  SK_NORM_SPECTRAL = 1,
} SkNorm;

// Opaque factorization handle.
typedef struct SkFactors SkFactors;

// Opaque matrix handle.
typedef struct SkMatrix SkMatrix;

// Opaque skeleton-set handle.
typedef struct SkSkeleton SkSkeleton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing this thread's most recent failure. The pointer stays
// valid until the next failing call on the same thread.
const char *sk_last_error_message(void);

// Create a dense matrix from a row-major buffer of `rows * cols` values.
//
// # Safety
// `data` must point to `len` readable doubles and `out` must be writable.
enum SkStatus sk_matrix_from_dense(size_t rows,
                                   size_t cols,
                                   const double *data,
                                   size_t len,
                                   struct SkMatrix **out);

// Create a sparse matrix from coordinate triplets (0-based indices;
// duplicates are summed).
//
// # Safety
// The three arrays must each hold `nnz` readable elements and `out` must be writable.
enum SkStatus sk_matrix_from_triplets(size_t rows,
                                      size_t cols,
                                      const size_t *row_indices,
                                      const size_t *col_indices,
                                      const double *values,
                                      size_t nnz,
                                      struct SkMatrix **out);

// Load a Matrix Market file.
//
// # Safety
// `path` must be a readable NUL-terminated string and `out` must be writable.
enum SkStatus sk_matrix_from_matrix_market(const char *path, struct SkMatrix **out);

// Generate a sparse non-negative synthetic matrix
// `sum_i weights[i] x_i y_i^T` with the given factor density and seed.
//
// # Safety
// `weights` must point to `weights_len` readable doubles and `out` must be writable.
enum SkStatus sk_matrix_snn(size_t rows,
                            size_t cols,
                            const double *weights,
                            size_t weights_len,
                            double density,
                            uint64_t seed,
                            struct SkMatrix **out);

// Row count; 0 for a null handle.
//
// # Safety
// `m` must be null or a live matrix handle.
size_t sk_matrix_rows(const struct SkMatrix *m);

// Column count; 0 for a null handle.
//
// # Safety
// `m` must be null or a live matrix handle.
size_t sk_matrix_cols(const struct SkMatrix *m);

// Stored nonzero count; 0 for a null handle.
//
// # Safety
// `m` must be null or a live matrix handle.
size_t sk_matrix_nnz(const struct SkMatrix *m);

// Completed streamed passes over the data.
//
// # Safety
// `m` must be null or a live matrix handle.
uint64_t sk_matrix_passes(const struct SkMatrix *m);

// Block applications of the operator or its transpose.
//
// # Safety
// `m` must be null or a live matrix handle.
uint64_t sk_matrix_applies(const struct SkMatrix *m);

// Write the matrix to a Matrix Market file.
//
// # Safety
// `m` must be a live matrix handle and `path` a readable NUL-terminated string.
enum SkStatus sk_matrix_write_matrix_market(const struct SkMatrix *m, const char *path);

// Release a matrix handle. Null is ignored.
//
// # Safety
// `m` must be null or a handle created by this library, not yet freed.
void sk_matrix_free(struct SkMatrix *m);

// Select `rank` column and row skeletons with the given algorithm and
// seed (Gaussian sketching).
//
// # Safety
// `m` must be a live matrix handle and `out` writable.
enum SkStatus sk_select(const struct SkMatrix *m,
                        enum SkAlgorithm alg,
                        size_t rank,
                        uint64_t seed,
                        struct SkSkeleton **out);

// Number of selected columns.
//
// # Safety
// `s` must be null or a live skeleton handle.
size_t sk_skeleton_rank(const struct SkSkeleton *s);

// Copy the algorithm name (NUL-terminated) into `buf`.
//
// # Safety
// `s` must be a live skeleton handle; `buf` must be writable for `cap` bytes.
enum SkStatus sk_skeleton_algorithm(const struct SkSkeleton *s, char *buf, size_t cap);

// Copy the 0-based column skeleton indices into `buf` (capacity
// `sk_skeleton_rank`).
//
// # Safety
// `s` must be a live skeleton handle; `buf` must be writable for `cap` entries.
enum SkStatus sk_skeleton_col_indices(const struct SkSkeleton *s, size_t *buf, size_t cap);

// Copy the 0-based row skeleton indices into `buf`.
//
// # Safety
// `s` must be a live skeleton handle; `buf` must be writable for `cap` entries.
enum SkStatus sk_skeleton_row_indices(const struct SkSkeleton *s, size_t *buf, size_t cap);

// A-posteriori certificate bound for the column selection, when available.
//
// # Safety
// `s` must be a live skeleton handle and `out` writable.
enum SkStatus sk_skeleton_eta_col(const struct SkSkeleton *s, double *out);

// A-posteriori certificate bound for the row selection, when available.
//
// # Safety
// `s` must be a live skeleton handle and `out` writable.
enum SkStatus sk_skeleton_eta_row(const struct SkSkeleton *s, double *out);

// Serialize the skeleton set as its TOML document; `written` receives the
// text length (without the NUL).
//
// # Safety
// `s` must be a live skeleton handle; `buf` must be writable for `cap` bytes; `written` may be null.
enum SkStatus sk_skeleton_document(const struct SkSkeleton *s,
                                   char *buf,
                                   size_t cap,
                                   size_t *written);

// Release a skeleton handle. Null is ignored.
//
// # Safety
// `s` must be null or a handle created by this library, not yet freed.
void sk_skeleton_free(struct SkSkeleton *s);

// Stable CUR factors `Q_C (Q_C^T A Q_R) Q_R^T` from a two-sided skeleton.
//
// # Safety
// Both handles must be live and `out` writable.
enum SkStatus sk_build_cur(const struct SkMatrix *m,
                           const struct SkSkeleton *s,
                           struct SkFactors **out);

// Column interpolative decomposition `C (C^+ A)`.
//
// # Safety
// Both handles must be live and `out` writable.
enum SkStatus sk_build_column_id(const struct SkMatrix *m,
                                 const struct SkSkeleton *s,
                                 struct SkFactors **out);

// Two-sided interpolative decomposition `(C S^{-1}) S (C^+ A)`.
//
// # Safety
// Both handles must be live and `out` writable.
enum SkStatus sk_build_two_sided_id(const struct SkMatrix *m,
                                    const struct SkSkeleton *s,
                                    struct SkFactors **out);

// Decomposition rank.
//
// # Safety
// `f` must be null or a live factors handle.
size_t sk_factors_rank(const struct SkFactors *f);

// Rows of the approximated matrix.
//
// # Safety
// `f` must be null or a live factors handle.
size_t sk_factors_rows(const struct SkFactors *f);

// Columns of the approximated matrix.
//
// # Safety
// `f` must be null or a live factors handle.
size_t sk_factors_cols(const struct SkFactors *f);

// Copy the factor kind name (NUL-terminated) into `buf`.
//
// # Safety
// `f` must be a live factors handle; `buf` must be writable for `cap` bytes.
enum SkStatus sk_factors_kind(const struct SkFactors *f, char *buf, size_t cap);

// `y = F x` without forming the approximation densely. `x` has length
// `cols`, `y` has length `rows`.
//
// # Safety
// `x` must hold `x_len` readable and `y` `y_len` writable doubles.
enum SkStatus sk_factors_apply(const struct SkFactors *f,
                               const double *x,
                               size_t x_len,
                               double *y,
                               size_t y_len);

// Densify the approximation into a row-major `rows * cols` buffer.
//
// # Safety
// `buf` must be writable for `len` doubles.
enum SkStatus sk_factors_reconstruct(const struct SkFactors *f, double *buf, size_t len);

// Export the factors as a directory of Matrix Market files plus manifest.
//
// # Safety
// `f` must be a live factors handle and `path` a readable NUL-terminated string.
enum SkStatus sk_factors_export_dir(const struct SkFactors *f, const char *path);

// Evaluate the factorization error against the rank-`k` truncated-SVD
// optimum (desk scale only).
//
// # Safety
// Handles must be live; the three out-pointers may each be null.
enum SkStatus sk_factors_error(const struct SkMatrix *m,
                               const struct SkFactors *f,
                               size_t k,
                               enum SkNorm norm,
                               double *err,
                               double *opt_err,
                               double *ratio);

// Release a factors handle. Null is ignored.
//
// # Safety
// `f` must be null or a handle created by this library, not yet freed.
void sk_factors_free(struct SkFactors *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKELKIT_H */
