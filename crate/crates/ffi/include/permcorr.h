#ifndef PERMCORR_H
#define PERMCORR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  PC_STATUS_SIZE_MISMATCH = 3,
  PC_STATUS_SYMMETRY_VIOLATION = 4,
  PC_STATUS_HOLLOW_VIOLATION = 5,
  PC_STATUS_NON_FINITE = 6,
  PC_STATUS_REQUIRES_SYMMETRIC = 7,
  PC_STATUS_DEGENERATE = 8,
  PC_STATUS_CAP_EXCEEDED = 9,
  PC_STATUS_PANIC = 99,
} PcStatus;

typedef enum PcSymmetry {
  PC_SYMMETRY_SYMMETRIC = 0,
  PC_SYMMETRY_ANTISYMMETRIC = 1,
  PC_SYMMETRY_GENERAL = 2,
} PcSymmetry;

typedef enum PcNormalizer {
  PC_NORMALIZER_EXACT_SD = 0,
  PC_NORMALIZER_DANIELS = 1,
  PC_NORMALIZER_PHAM2 = 2,
  PC_NORMALIZER_PHAM3 = 3,
} PcNormalizer;

typedef enum PcSidedness {
  PC_SIDEDNESS_GREATER = 0,
  PC_SIDEDNESS_LESS = 1,
  PC_SIDEDNESS_TWO_SIDED = 2,
} PcSidedness;

/**
 * Opaque coefficient matrix.
 */
typedef struct PcMatrix PcMatrix;

/**
 * Opaque exact or sampled permutation null.
 */
typedef struct PcNullDistribution PcNullDistribution;

typedef struct PcMomentReport {
  double mean;
  double second_moment;
  double variance;
  double normalizer_daniels;
  double normalizer_pham2;
  double normalizer_pham3;
  bool degenerate;
} PcMomentReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next `pc_*` call on the same thread.
 */
const char *pc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pc_version(void);

/**
 * Copies an `n × n` row-major array into a new matrix after validating
 * the declared symmetry and hollowness.
 */
enum PcStatus pc_matrix_new(size_t n,
                            const double *data,
                            enum PcSymmetry symmetry,
                            bool hollow,
                            struct PcMatrix **out_matrix);

void pc_matrix_free(struct PcMatrix *matrix);

enum PcStatus pc_matrix_order(const struct PcMatrix *matrix, size_t *out_n);

/**
 * Copies the `n²` entries, row-major, into `buffer` of length `len`.
 */
enum PcStatus pc_matrix_copy(const struct PcMatrix *matrix, double *buffer, size_t len);

/**
 * Γ under the 0-based permutation `perm` of length `n`.
 */
enum PcStatus pc_gamma(const struct PcMatrix *a,
                       const struct PcMatrix *b,
                       const size_t *perm,
                       size_t n,
                       double *out_value);

/**
 * Exact permutation mean of Γ.
 */
enum PcStatus pc_exact_mean(const struct PcMatrix *a, const struct PcMatrix *b, double *out_value);

/**
 * Exact permutation second moment of Γ, any symmetry class.
 */
enum PcStatus pc_exact_second_moment(const struct PcMatrix *a,
                                     const struct PcMatrix *b,
                                     double *out_value);

/**
 * Exact permutation variance; 0 when degenerate.
 */
enum PcStatus pc_exact_variance(const struct PcMatrix *a,
                                const struct PcMatrix *b,
                                double *out_value);

enum PcStatus pc_normalizer(const struct PcMatrix *a,
                            const struct PcMatrix *b,
                            enum PcNormalizer normalizer_kind,
                            double *out_value);

/**
 * `exact_sd` centers at the exact mean; theorem normalizers divide raw Γ.
 */
enum PcStatus pc_standardize(double gamma_obs,
                             const struct PcMatrix *a,
                             const struct PcMatrix *b,
                             enum PcNormalizer normalizer_kind,
                             double *out_value);

enum PcStatus pc_moment_report(const struct PcMatrix *a,
                               const struct PcMatrix *b,
                               struct PcMomentReport *out_report);

/**
 * All N! values of Γ. `cap` of 0 means the default (8); at most 9.
 */
enum PcStatus pc_enumerate_exact(const struct PcMatrix *a,
                                 const struct PcMatrix *b,
                                 size_t cap,
                                 struct PcNullDistribution **out_null);

/**
 * Monte Carlo null. `workers` of 0 uses the global pool; the values do
 * not depend on it.
 */
enum PcStatus pc_sample_null(const struct PcMatrix *a,
                             const struct PcMatrix *b,
                             uint64_t draws,
                             uint64_t seed,
                             size_t workers,
                             struct PcNullDistribution **out_null);

void pc_null_free(struct PcNullDistribution *null);

enum PcStatus pc_null_len(const struct PcNullDistribution *null, size_t *out_len);

/**
 * Copies the null values into `buffer` of length `len` (at least
 * `pc_null_len`).
 */
enum PcStatus pc_null_values(const struct PcNullDistribution *null, double *buffer, size_t len);

enum PcStatus pc_null_p_value(const struct PcNullDistribution *null,
                              double gamma_obs,
                              enum PcSidedness sidedness,
                              double *out_value);

/**
 * KS distance of the null, standardized by `normalizer_kind`, from N(0, 1).
 */
enum PcStatus pc_ks_normal(const struct PcNullDistribution *null,
                           const struct PcMatrix *a,
                           const struct PcMatrix *b,
                           enum PcNormalizer normalizer_kind,
                           double *out_value);

/**
 * `sign(x_i − x_j)`.
 */
enum PcStatus pc_sign_diff_matrix(const double *values, size_t n, struct PcMatrix **out_matrix);

/**
 * `rank(x_i) − rank(x_j)` with midranks for ties.
 */
enum PcStatus pc_rank_diff_matrix(const double *values, size_t n, struct PcMatrix **out_matrix);

/**
 * Euclidean MST adjacency of `n` row-major points in `dim` dimensions.
 */
enum PcStatus pc_mst_adjacency(const double *points,
                               size_t n,
                               size_t dim,
                               struct PcMatrix **out_matrix);

/**
 * Pairwise distances minus their mean, hollow.
 */
enum PcStatus pc_centered_distance_matrix(const double *points,
                                          size_t n,
                                          size_t dim,
                                          struct PcMatrix **out_matrix);

/**
 * Gaussian kernel; `bandwidth <= 0` selects the median heuristic.
 */
enum PcStatus pc_kernel_matrix(const double *points,
                               size_t n,
                               size_t dim,
                               double bandwidth,
                               struct PcMatrix **out_matrix);

/**
 * MMD label contrast for 0/1 labels.
 */
enum PcStatus pc_mmd_label_matrix(const uint8_t *labels, size_t n, struct PcMatrix **out_matrix);

/**
 * `|y_i − y_j|` for 0/1 labels.
 */
enum PcStatus pc_abs_label_diff(const uint8_t *labels, size_t n, struct PcMatrix **out_matrix);

/**
 * Weighted label matrix; `p < 0` selects `p = m / N`.
 */
enum PcStatus pc_weighted_label_matrix(const uint8_t *labels,
                                       size_t n,
                                       double p,
                                       struct PcMatrix **out_matrix);

/**
 * Condition reports for every theorem applicable to `(a, b)`, as a JSON
 * array. Release the string with [`pc_string_free`].
 */
enum PcStatus pc_diagnose_json(const struct PcMatrix *a, const struct PcMatrix *b, char **out_json);

void pc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERMCORR_H */
