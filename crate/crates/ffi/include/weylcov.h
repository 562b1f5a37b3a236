#ifndef WEYLCOV_H
#define WEYLCOV_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WeylcovStatus {
  WEYLCOV_STATUS_OK = 0,
  WEYLCOV_STATUS_NULL_POINTER = 1,
  WEYLCOV_STATUS_INVALID_DIMENSION = 2,
  WEYLCOV_STATUS_NON_PRIME_DIMENSION = 3,
  WEYLCOV_STATUS_SHAPE_MISMATCH = 4,
  WEYLCOV_STATUS_INVALID_ARGUMENT = 5,
  WEYLCOV_STATUS_NOT_A_STATE = 6,
  WEYLCOV_STATUS_NUMERICAL = 7,
  WEYLCOV_STATUS_PANIC = 8,
} WeylcovStatus;

/**
 * A Weyl map `X ↦ Σ μ_kl W_kl X W_kl†`.
 */
typedef struct WeylcovMap WeylcovMap;

/**
 * A positive-map candidate with its certificate.
 */
typedef struct WeylcovPosMap WeylcovPosMap;

typedef struct WeylcovTable WeylcovTable;

typedef struct WeylcovChannelVerdict {
  bool cp;
  bool tp;
  double min_choi_eigenvalue;
  double coefficient_sum_re;
  double coefficient_sum_im;
} WeylcovChannelVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail of the last failure on this thread, or NULL. Free with [`weylcov_string_free`].
 */
char *weylcov_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library that has not been freed.
 */
void weylcov_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *weylcov_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WeylcovStatus weylcov_table_new(size_t d, struct WeylcovTable **out);

/**
 * # Safety
 * `table` must be NULL or a live handle from [`weylcov_table_new`].
 */
void weylcov_table_free(struct WeylcovTable *table);

/**
 * # Safety
 * `table` must be a live handle; `rows`, `cols` and `partial` must be writable.
 */
enum WeylcovStatus weylcov_table_shape(const struct WeylcovTable *table,
                                       size_t *rows,
                                       size_t *cols,
                                       bool *partial);

/**
 * # Safety
 * `table` must be a live handle; `re` and `im` must be writable.
 */
enum WeylcovStatus weylcov_table_entry(const struct WeylcovTable *table,
                                       size_t row,
                                       size_t col,
                                       double *re,
                                       double *im);

/**
 * Table as CSV. Free with [`weylcov_string_free`].
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum WeylcovStatus weylcov_table_csv(const struct WeylcovTable *table, char **out);

/**
 * Map from its d² Kraus weights, flat index `k·d + l`.
 *
 * # Safety
 * `re`/`im` must hold `len` doubles; `out` must be writable.
 */
enum WeylcovStatus weylcov_map_new(size_t d,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct WeylcovMap **out);

/**
 * Map from its d² eigenvalues on the Weyl basis.
 *
 * # Safety
 * `re`/`im` must hold `len` doubles; `out` must be writable.
 */
enum WeylcovStatus weylcov_map_from_spectrum(size_t d,
                                             const double *re,
                                             const double *im,
                                             size_t len,
                                             struct WeylcovMap **out);

/**
 * # Safety
 * `map` must be NULL or a live handle.
 */
void weylcov_map_free(struct WeylcovMap *map);

/**
 * # Safety
 * `map` must be a live handle; `d` must be writable.
 */
enum WeylcovStatus weylcov_map_dim(const struct WeylcovMap *map, size_t *d);

/**
 * # Safety
 * `map` must be a live handle; `re`/`im` must hold `len` = d² writable doubles.
 */
enum WeylcovStatus weylcov_map_spectrum(const struct WeylcovMap *map,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * `Y = Φ[X]` for d×d row-major `X`.
 *
 * # Safety
 * Input buffers must hold `len` = d² readable doubles and output buffers `len` writable ones.
 */
enum WeylcovStatus weylcov_map_apply(const struct WeylcovMap *map,
                                     const double *x_re,
                                     const double *x_im,
                                     double *y_re,
                                     double *y_im,
                                     size_t len);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum WeylcovStatus weylcov_map_is_channel(const struct WeylcovMap *map,
                                          double eps_eq,
                                          double eps_psd,
                                          struct WeylcovChannelVerdict *out);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum WeylcovStatus weylcov_map_is_gpc(const struct WeylcovMap *map,
                                      double eps_eq,
                                      double eps_psd,
                                      bool *out);

/**
 * `X ↦ Σ_α λ_α F_α X F_α†` over the frame `F_α = W_α/√d`.
 *
 * `delta` lists the `n_minus` indices carrying `lambda_minus`; `lambda_plus`
 * gives the remaining `d² − n_minus` weights in ascending index order.
 *
 * # Safety
 * Arrays must hold the stated counts; `out` must be writable.
 */
enum WeylcovStatus weylcov_posmap_new(size_t d,
                                      const size_t *delta,
                                      const double *lambda_minus,
                                      size_t n_minus,
                                      const double *lambda_plus,
                                      size_t n_plus,
                                      double eps_eq,
                                      double eps_psd,
                                      struct WeylcovPosMap **out);

/**
 * `X ↦ (I Tr X − X)/(d−1)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum WeylcovStatus weylcov_posmap_reduction(size_t d, struct WeylcovPosMap **out);

/**
 * # Safety
 * `map` must be NULL or a live handle.
 */
void weylcov_posmap_free(struct WeylcovPosMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum WeylcovStatus weylcov_posmap_certified(const struct WeylcovPosMap *map, bool *out);

/**
 * `Y = Φ[X]` for d×d row-major `X`.
 *
 * # Safety
 * Input buffers must hold `len` = d² readable doubles and output buffers `len` writable ones.
 */
enum WeylcovStatus weylcov_posmap_apply(const struct WeylcovPosMap *map,
                                        const double *x_re,
                                        const double *x_im,
                                        double *y_re,
                                        double *y_im,
                                        size_t len);

/**
 * Seeded rank-1 probe; `violated` is set when a witness was found.
 *
 * # Safety
 * `map` must be a live handle; `min_eigenvalue` and `violated` must be writable.
 */
enum WeylcovStatus weylcov_posmap_probe(const struct WeylcovPosMap *map,
                                        size_t trials,
                                        uint64_t seed,
                                        double eps_eq,
                                        double eps_psd,
                                        double *min_eigenvalue,
                                        bool *violated);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEYLCOV_H */
