/*
 * Copyright 2026 The diabens Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DIABENS_DIABENS_H_
#define DIABENS_DIABENS_H_

/*
 * C interface to the diabens library. All objects are opaque handles owned by
 * the caller and released with the matching *_free function. Every fallible
 * call returns a diabens_status; on failure diabens_last_error() describes the
 * problem (the message is per thread and valid until the next failing call on
 * that thread).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DIABENS_BUILDING_LIBRARY)
#    define DIABENS_API __declspec(dllexport)
#  else
#    define DIABENS_API __declspec(dllimport)
#  endif
#else
#  define DIABENS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum diabens_status {
  DIABENS_OK = 0,
  DIABENS_ERR_USAGE = 1,
  DIABENS_ERR_IO = 2,
  DIABENS_ERR_DATA = 3,
  DIABENS_ERR_NUMERIC = 4,
  DIABENS_ERR_INTERNAL = 5
} diabens_status;

typedef struct diabens_dataset diabens_dataset;
typedef struct diabens_model diabens_model;
typedef struct diabens_ensemble diabens_ensemble;
typedef struct diabens_config diabens_config;

/* Metric order: accuracy, precision, negative predictive value, sensitivity,
 * specificity, F1. defined[i] == 0 marks a 0/0 metric. */
typedef struct diabens_metric_report {
  double values[6];
  int defined[6];
  uint64_t tp, fp, tn, fn;
} diabens_metric_report;

typedef void (*diabens_log_fn)(const char* line, void* user);

DIABENS_API const char* diabens_version(void);
DIABENS_API const char* diabens_last_error(void);
DIABENS_API const char* diabens_status_name(diabens_status status);

/* Process exit code for a status: 0 ok, 2 usage, 3 io/data, 4 numeric,
 * 1 internal. */
DIABENS_API int diabens_exit_code(diabens_status status);

/* ---- datasets ----------------------------------------------------------- */

/* feature_columns may be NULL (all non-label columns, file order). */
DIABENS_API diabens_status diabens_dataset_load_csv(const char* path, const char* label_column,
                                                    const char* const* feature_columns,
                                                    size_t n_feature_columns, diabens_dataset** out);

/* Aggregates per-patient vitals into the 17-feature layout. Cells without any
 * observation are missing (NaN) until diabens_dataset_preprocess. */
DIABENS_API diabens_status diabens_dataset_load_vitals(const char* vitals_path,
                                                       const char* demographics_path,
                                                       diabens_dataset** out);

/* features is row-major rows x cols; labels in {0,1}. Names default to
 * x0..x{cols-1}. */
DIABENS_API diabens_status diabens_dataset_from_arrays(const double* features, const int* labels,
                                                       size_t rows, size_t cols,
                                                       diabens_dataset** out);

DIABENS_API void diabens_dataset_free(diabens_dataset* data);
DIABENS_API size_t diabens_dataset_rows(const diabens_dataset* data);
DIABENS_API size_t diabens_dataset_cols(const diabens_dataset* data);
DIABENS_API const char* diabens_dataset_feature_name(const diabens_dataset* data, size_t col);
DIABENS_API diabens_status diabens_dataset_value(const diabens_dataset* data, size_t row, size_t col,
                                                 double* out);
DIABENS_API diabens_status diabens_dataset_label(const diabens_dataset* data, size_t row, int* out);

/* Exact zeros in the named columns become missing. */
DIABENS_API diabens_status diabens_dataset_zeros_to_missing(diabens_dataset* data,
                                                            const char* const* columns,
                                                            size_t n_columns);

/* Stratified split; both outputs are new handles. */
DIABENS_API diabens_status diabens_dataset_split(const diabens_dataset* data, double test_fraction,
                                                 uint64_t seed, diabens_dataset** train_out,
                                                 diabens_dataset** test_out);

/* Mean imputation + standardization fit on `train`, applied to both in place.
 * `test` may be NULL. */
DIABENS_API diabens_status diabens_dataset_preprocess(diabens_dataset* train, diabens_dataset* test);

DIABENS_API diabens_status diabens_dataset_write_csv(const diabens_dataset* data, const char* path);

/* Writes synthetic vitals and demographics CSV files. */
DIABENS_API diabens_status diabens_generate_synthetic(size_t n_patients, uint64_t seed,
                                                      const char* vitals_path,
                                                      const char* demographics_path);

/* ---- configuration ------------------------------------------------------ */

DIABENS_API diabens_config* diabens_config_create(void);
DIABENS_API void diabens_config_free(diabens_config* config);
/* Keys use underscores (test_fraction, knn_k, ...); dashes are accepted too. */
DIABENS_API diabens_status diabens_config_set(diabens_config* config, const char* key,
                                              const char* value);
DIABENS_API diabens_status diabens_config_load_file(diabens_config* config, const char* path);

/* ---- models ------------------------------------------------------------- */

/* kind: knn, svm, tree, forest, boosting, mlp, nb. Hyperparameters come from
 * `config` (NULL for defaults). */
DIABENS_API diabens_status diabens_model_train(const char* kind, const diabens_dataset* train,
                                               const diabens_config* config, diabens_model** out);
DIABENS_API void diabens_model_free(diabens_model* model);
DIABENS_API const char* diabens_model_kind(const diabens_model* model);
DIABENS_API size_t diabens_model_feature_count(const diabens_model* model);
DIABENS_API diabens_status diabens_model_predict_proba(const diabens_model* model, const double* x,
                                                       size_t n, double* out);
/* out receives one probability per dataset row. */
DIABENS_API diabens_status diabens_model_predict_dataset(const diabens_model* model,
                                                         const diabens_dataset* data, double* out);
DIABENS_API diabens_status diabens_model_feature_importance(const diabens_model* model, double* out,
                                                            size_t n);
DIABENS_API diabens_status diabens_model_evaluate(const diabens_model* model,
                                                  const diabens_dataset* data, double threshold,
                                                  diabens_metric_report* out);
DIABENS_API diabens_status diabens_model_save(const diabens_model* model, const char* path);
DIABENS_API diabens_status diabens_model_load(const char* path, diabens_model** out);

/* ---- metrics ------------------------------------------------------------ */

DIABENS_API diabens_status diabens_evaluate_labels(const int* predicted, const int* actual, size_t n,
                                                   diabens_metric_report* out);
/* clip_epsilon <= 0 selects the default (1e-15). */
DIABENS_API diabens_status diabens_log_loss(const double* probabilities, const int* actual, size_t n,
                                            double clip_epsilon, double* out);

/* ---- ensembles ---------------------------------------------------------- */

/* Members are copied; the caller keeps ownership of the model handles. */
DIABENS_API diabens_status diabens_ensemble_create(const diabens_model* const* members,
                                                   const double* weights, size_t n_members,
                                                   double threshold, diabens_ensemble** out);
DIABENS_API void diabens_ensemble_free(diabens_ensemble* ensemble);
DIABENS_API diabens_status diabens_ensemble_predict_proba(const diabens_ensemble* ensemble,
                                                          const double* x, size_t n, double* out);
DIABENS_API diabens_status diabens_ensemble_evaluate(const diabens_ensemble* ensemble,
                                                     const diabens_dataset* data,
                                                     diabens_metric_report* out);
/* Log-loss optimal weights (normalized) on `data`; loss_out may be NULL. */
DIABENS_API diabens_status diabens_ensemble_optimize(const diabens_model* const* members,
                                                     size_t n_members, const diabens_dataset* data,
                                                     uint64_t seed, double* weights_out,
                                                     double* loss_out);
DIABENS_API diabens_status diabens_ensemble_load(const char* path, diabens_ensemble** out);

/* ---- pipeline commands -------------------------------------------------- */

/* command: synth, prepare, train, cv, ensemble, report. Progress lines go to
 * `log` when non-NULL. */
DIABENS_API diabens_status diabens_run_command(const diabens_config* config, const char* command,
                                               diabens_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif  // DIABENS_DIABENS_H_
