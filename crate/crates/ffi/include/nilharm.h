#ifndef NILHARM_H
#define NILHARM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum NhStatus {
  NH_STATUS_OK = 0,
  NH_STATUS_NULL_POINTER = 1,
  NH_STATUS_DIMENSION_MISMATCH = 2,
  NH_STATUS_NONDEGENERACY = 3,
  NH_STATUS_TRUNCATION = 4,
  NH_STATUS_INVALID_INPUT = 5,
  NH_STATUS_PARSE = 6,
  NH_STATUS_IO = 7,
  NH_STATUS_PANIC = 8,
} NhStatus;

// A two-step nilpotent Lie algebra.
typedef struct NhAlgebra NhAlgebra;

// The eigenfunction of the sublaplacian for one `(λ, α)`.
typedef struct NhEigenfunction NhEigenfunction;

// An orthonormal frame adapted to a nondegenerate central functional.
typedef struct NhFrame NhFrame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t nh_last_error_message(char *buf, size_t len);

// Heisenberg algebra with `2n` horizontal and one central dimension.
//
// # Safety
// `result` must be a valid pointer.
enum NhStatus nh_algebra_heisenberg(size_t n, struct NhAlgebra **result);

// Free two-step algebra on `m` generators.
//
// # Safety
// `result` must be a valid pointer.
enum NhStatus nh_algebra_free_two_step(size_t m, struct NhAlgebra **result);

// Builtin algebra by name: `heisenberg-<n>` or `free2step-<m>`.
//
// # Safety
// `name` must be a NUL-terminated string and `result` a valid pointer.
enum NhStatus nh_algebra_builtin(const char *name, struct NhAlgebra **result);

// Algebra from definition text.
//
// # Safety
// `definition` must be a NUL-terminated string and `result` a valid pointer.
enum NhStatus nh_algebra_parse(const char *definition, struct NhAlgebra **result);

// Algebra from a definition file.
//
// # Safety
// `path` must be a NUL-terminated string and `result` a valid pointer.
enum NhStatus nh_algebra_from_file(const char *path, struct NhAlgebra **result);

// # Safety
// `a` must be null or a handle from an `nh_algebra_*` constructor not yet freed.
void nh_algebra_free(struct NhAlgebra *a);

// Horizontal dimension `m` and central dimension `k`.
//
// # Safety
// All pointers must be valid.
enum NhStatus nh_algebra_dims(const struct NhAlgebra *a, size_t *m, size_t *k);

// Bracket of two horizontal vectors (length `m`) into `result` (length `k`).
//
// # Safety
// Each array must hold the stated number of elements.
enum NhStatus nh_algebra_bracket(const struct NhAlgebra *a,
                                 const double *v,
                                 size_t v_len,
                                 const double *w,
                                 size_t w_len,
                                 double *result,
                                 size_t result_len);

// Group product `g·h`, each element given as horizontal part (length `m`)
// and central part (length `k`).
//
// # Safety
// Input arrays must hold `m` and `k` elements as named; outputs likewise.
enum NhStatus nh_algebra_multiply(const struct NhAlgebra *a,
                                  const double *g_v,
                                  const double *g_z,
                                  const double *h_v,
                                  const double *h_z,
                                  double *out_v,
                                  double *out_z);

// Group inverse.
//
// # Safety
// Arrays must hold `m` and `k` elements as named.
enum NhStatus nh_algebra_inverse(const struct NhAlgebra *a,
                                 const double *g_v,
                                 const double *g_z,
                                 double *out_v,
                                 double *out_z);

// Whether generic central functionals give nondegenerate skew forms,
// tested on `trials` random functionals.
//
// # Safety
// All pointers must be valid.
enum NhStatus nh_algebra_is_mw(const struct NhAlgebra *a,
                               size_t trials,
                               uint64_t seed,
                               double tol,
                               bool *result);

// Frame for the central functional `lambda` (length `k`). A non-positive
// `tol` selects the default nondegeneracy tolerance.
//
// # Safety
// `lambda` must hold `lambda_len` elements and `result` must be valid.
enum NhStatus nh_frame_new(const struct NhAlgebra *a,
                           const double *lambda,
                           size_t lambda_len,
                           double tol,
                           struct NhFrame **result);

// # Safety
// `f` must be null or a handle from [`nh_frame_new`] not yet freed.
void nh_frame_free(struct NhFrame *f);

// Number of pairs `n` (so `m = 2n`).
//
// # Safety
// All pointers must be valid.
enum NhStatus nh_frame_pairs(const struct NhFrame *f, size_t *n);

// Weights `d_1 ≥ … ≥ d_n` into `result` (length `n`).
//
// # Safety
// `result` must hold `len` elements.
enum NhStatus nh_frame_weights(const struct NhFrame *f, double *result, size_t len);

// Vectors `X_j` (`x_part` true) or `Y_j` as an `m × n` column-major matrix.
//
// # Safety
// `result` must hold `len` elements.
enum NhStatus nh_frame_vectors(const struct NhFrame *f, bool x_part, double *result, size_t len);

// Eigenfunction for `lambda` (length `k`) and multi-index `alpha` (length
// `m / 2`). A non-positive `tol` selects the default.
//
// # Safety
// Arrays must hold the stated number of elements and `result` must be valid.
enum NhStatus nh_eigenfunction_new(const struct NhAlgebra *a,
                                   const double *lambda,
                                   size_t lambda_len,
                                   const size_t *alpha,
                                   size_t alpha_len,
                                   double tol,
                                   struct NhEigenfunction **result);

// # Safety
// `e` must be null or a handle from [`nh_eigenfunction_new`] not yet freed.
void nh_eigenfunction_free(struct NhEigenfunction *e);

// Sublaplacian eigenvalue `−|λ|`.
//
// # Safety
// All pointers must be valid.
enum NhStatus nh_eigenfunction_eigenvalue(const struct NhEigenfunction *e, double *result);

// Value at the group point `(v, z)`; `v` has length `m`, `z` length `k`.
//
// # Safety
// Arrays must hold the stated number of elements; outputs must be valid.
enum NhStatus nh_eigenfunction_eval(const struct NhEigenfunction *e,
                                    const double *v,
                                    size_t v_len,
                                    const double *z,
                                    size_t z_len,
                                    double *re,
                                    double *im);

// Normalized Hermite function `h_α(ξ)`; `alpha` and `xi` have length `n`.
//
// # Safety
// Arrays must hold `n` elements; `result` must be valid.
enum NhStatus nh_hermite_eval(const size_t *alpha, const double *xi, size_t n, double *result);

// Diagonal special Hermite function `Φ_{α,α}(z)`; `z` holds `n` complex
// numbers as interleaved `(re, im)` pairs.
//
// # Safety
// `alpha` must hold `n` elements, `z` `2n`; outputs must be valid.
enum NhStatus nh_special_hermite_diag(const size_t *alpha,
                                      const double *z,
                                      size_t n,
                                      double *re,
                                      double *im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILHARM_H */
