#ifndef COD_H
#define COD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CodStatus {
  COD_STATUS_OK = 0,
  COD_STATUS_NULL_POINTER = 1,
  COD_STATUS_INVALID_ARGUMENT = 2,
  COD_STATUS_IO = 3,
  COD_STATUS_PARSE = 4,
  COD_STATUS_SIZE_MISMATCH = 5,
  COD_STATUS_RUNTIME = 6,
  COD_STATUS_PANIC = 7,
} CodStatus;

typedef struct CodDataset CodDataset;

typedef struct CodModel CodModel;

/**
 * Detector parameters; start from [`cod_params_default`].
 */
typedef struct CodParams {
  size_t k;
  size_t q;
  double percentile;
  double entropy_tol;
  bool normalize;
} CodParams;

struct CodParams cod_params_default(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next `cod_*` call on the same thread.
 */
const char *cod_last_error_message(void);

/**
 * Loads a CSV file with a header row, label in the last column.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CodStatus cod_dataset_from_csv(const char *path, struct CodDataset **out);

/**
 * Builds a dataset from `n_samples * n_features` row-major values and one
 * label per sample. Labels may be any integers; classes are numbered by
 * first appearance.
 *
 * # Safety
 * `features` must point to `n_samples * n_features` doubles, `labels` to
 * `n_samples` integers, and `out` must be valid.
 */
enum CodStatus cod_dataset_from_arrays(const double *features,
                                       size_t n_samples,
                                       size_t n_features,
                                       const int64_t *labels,
                                       struct CodDataset **out);

/**
 * # Safety
 * `ds` must be null or a handle from this library.
 */
size_t cod_dataset_n_samples(const struct CodDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle from this library.
 */
size_t cod_dataset_n_features(const struct CodDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle from this library, not freed before.
 */
void cod_dataset_free(struct CodDataset *ds);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CodStatus cod_model_load(const char *path, struct CodModel **out);

/**
 * Trains the default model on the synthetic corpus. `params` may be null
 * for the defaults.
 *
 * # Safety
 * `params` must be null or valid, `out` must be valid.
 */
enum CodStatus cod_model_train_default(uint64_t seed,
                                       const struct CodParams *params,
                                       struct CodModel **out);

/**
 * # Safety
 * `model` must be a handle from this library, `path` a NUL-terminated string.
 */
enum CodStatus cod_model_save(const struct CodModel *model, const char *path);

/**
 * Copies the three weights `[w1, w2, bias]` into `out`.
 *
 * # Safety
 * `model` must be a handle from this library, `out` must hold 3 doubles.
 */
enum CodStatus cod_model_weights(const struct CodModel *model, double *out);

/**
 * # Safety
 * `model` must be null or a handle from this library, not freed before.
 */
void cod_model_free(struct CodModel *model);

/**
 * Runs the single-view detector. Fills `phi` with `2 * n` values
 * (`phi1, phi2` per sample), `scores` with `n` outlier probabilities and
 * `flags` with `n` decisions, where `n` must equal the sample count. Any
 * output pointer may be null to skip it.
 *
 * # Safety
 * Handles must come from this library; non-null buffers must hold the
 * stated number of elements.
 */
enum CodStatus cod_detect(const struct CodDataset *ds,
                          const struct CodModel *model,
                          const struct CodParams *params,
                          double threshold,
                          size_t n,
                          double *phi,
                          double *scores,
                          bool *flags);

/**
 * Mann-Whitney AUC of `scores` against `truth` (ties count one half).
 *
 * # Safety
 * `scores` and `truth` must hold `n` elements; `out` must be valid.
 */
enum CodStatus cod_auc(const double *scores, const bool *truth, size_t n, double *out);

#endif  /* COD_H */
