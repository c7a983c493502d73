/*
 * C interface to the edRVFL family: batch-norm re-normalized ensemble deep
 * random vector functional link networks with optional per-sample weighting
 * (WedRVFL), neuron pruning (PedRVFL), or both (WPedRVFL), plus the
 * cross-validation / benchmarking protocol around them.
 *
 * All functions return EDRVFL_OK (0) on success or a negative-free status
 * code; edrvfl_last_error() describes the most recent failure on the
 * calling thread. Objects returned through out-parameters are owned by the
 * caller and released with the matching *_free function. Strings returned
 * through char** are released with edrvfl_string_free.
 *
 * Handles are opaque; a table or model may be shared by concurrent readers
 * but must not be freed while in use.
 */
#ifndef EDRVFL_H
#define EDRVFL_H

#include <stdint.h>

#if defined(_WIN32)
#define EDRVFL_API __declspec(dllexport)
#else
#define EDRVFL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum edrvfl_status {
  EDRVFL_OK = 0,
  EDRVFL_E_INVALID_ARGUMENT = 1,
  EDRVFL_E_DIMENSION_MISMATCH = 2,
  EDRVFL_E_SINGULAR_SYSTEM = 3,
  EDRVFL_E_NEGATIVE_WEIGHT = 4,
  EDRVFL_E_EMPTY_MATRIX = 5,
  EDRVFL_E_STATS_NOT_FITTED = 6,
  EDRVFL_E_PARSE = 7,
  EDRVFL_E_MISSING_LABEL_COLUMN = 8,
  EDRVFL_E_SINGLE_CLASS = 9,
  EDRVFL_E_CLASS_TOO_SMALL = 10,
  EDRVFL_E_CLASS_ABSENT = 11,
  EDRVFL_E_DEPTH_OUT_OF_RANGE = 12,
  EDRVFL_E_LENGTH_MISMATCH = 13,
  EDRVFL_E_INCOMPLETE_MATRIX = 14,
  EDRVFL_E_TOO_FEW_PAIRS = 15,
  EDRVFL_E_IO = 16,
  EDRVFL_E_FORMAT_VERSION = 17,
  EDRVFL_E_UNKNOWN = 127
} edrvfl_status;

typedef struct edrvfl_table edrvfl_table;
typedef struct edrvfl_model edrvfl_model;

EDRVFL_API const char* edrvfl_version(void);

/* Message for the last failing call on this thread; empty string if none. */
EDRVFL_API const char* edrvfl_last_error(void);

EDRVFL_API void edrvfl_string_free(char* s);
EDRVFL_API void edrvfl_buffer_free(double* p);

/* ---- tables ---------------------------------------------------------- */

/* label_column is a 0-based column index or, with has_header != 0, a
 * column name. */
EDRVFL_API edrvfl_status edrvfl_table_load_csv(const char* path,
                                               const char* label_column,
                                               int has_header,
                                               edrvfl_table** out);

/* features is row-major rows x cols; labels holds one string per row. */
EDRVFL_API edrvfl_status edrvfl_table_from_memory(const double* features,
                                                  const char* const* labels,
                                                  int64_t rows, int64_t cols,
                                                  edrvfl_table** out);

EDRVFL_API edrvfl_status edrvfl_table_set_name(edrvfl_table* table,
                                               const char* name);
EDRVFL_API void edrvfl_table_free(edrvfl_table* table);
EDRVFL_API int64_t edrvfl_table_rows(const edrvfl_table* table);
EDRVFL_API int64_t edrvfl_table_features(const edrvfl_table* table);
EDRVFL_API int32_t edrvfl_table_classes(const edrvfl_table* table);
EDRVFL_API const char* edrvfl_table_label_name(const edrvfl_table* table,
                                               int32_t class_index);

/* Feature-only CSV loader for prediction inputs; zero rows is legal.
 * drop_column (name/index, NULL for none) removes e.g. a label column.
 * *out_data receives a row-major rows x cols buffer. */
EDRVFL_API edrvfl_status edrvfl_features_load_csv(
    const char* path, int has_header, const char* drop_column,
    double** out_data, int64_t* out_rows, int64_t* out_cols);

/* ---- training and prediction ----------------------------------------- */

/* hyperparams_json: {"lambda","n","l_max","gamma","alpha","omega_r","p",
 * "activation","aggregation","epsilon","include_bias","seed"}; missing keys
 * take defaults. variant is one of "edrvfl","wedrvfl","pedrvfl","wpedrvfl"
 * and must not contradict the weighting/pruning parameters.
 * out_report_json (optional) receives per-layer training accuracies. */
EDRVFL_API edrvfl_status edrvfl_train(const edrvfl_table* table,
                                      const char* hyperparams_json,
                                      const char* variant,
                                      edrvfl_model** out_model,
                                      char** out_report_json);

EDRVFL_API edrvfl_status edrvfl_model_save(const edrvfl_model* model,
                                           const char* path);
EDRVFL_API edrvfl_status edrvfl_model_load(const char* path,
                                           edrvfl_model** out);
EDRVFL_API void edrvfl_model_free(edrvfl_model* model);
EDRVFL_API int32_t edrvfl_model_layers(const edrvfl_model* model);
EDRVFL_API int64_t edrvfl_model_features(const edrvfl_model* model);
EDRVFL_API int32_t edrvfl_model_classes(const edrvfl_model* model);
EDRVFL_API const char* edrvfl_model_label_name(const edrvfl_model* model,
                                               int32_t class_index);

/* features: raw (un-normalized) row-major rows x cols. depth 0 uses every
 * layer; 1..layers restricts the ensemble to the first layers. out_labels
 * receives one class index per row. */
EDRVFL_API edrvfl_status edrvfl_predict(const edrvfl_model* model,
                                        const double* features, int64_t rows,
                                        int64_t cols, int32_t depth,
                                        int32_t* out_labels);

/* ---- evaluation protocol --------------------------------------------- */

/* config_json keys (all optional unless noted):
 *   "variant"      (required) variant name
 *   "grid"         grid object or the string "coarse_default"
 *   "folds"        default 4
 *   "val_fraction" default 0.25
 *   "seed"         (required) partition seed and base weight seed
 *   "repetitions"  repeat-runs only, default 10
 *   "jobs"         repeat-runs only, default 1
 *   "hyperparams"  base values for axes the grid does not cover
 * Result JSON matches the fields written to benchmark results files. */
EDRVFL_API edrvfl_status edrvfl_run_cv_json(const edrvfl_table* table,
                                            const char* config_json,
                                            char** out_json);
EDRVFL_API edrvfl_status edrvfl_repeat_runs_json(const edrvfl_table* table,
                                                 const char* config_json,
                                                 char** out_json);

/* config_json: {"parameter":"omega_r"|"p","values":[...],"seed":...,
 * "folds":...,"hyperparams":{...}}. Result: {"points":[{"value","accuracy"}]} */
EDRVFL_API edrvfl_status edrvfl_sweep_json(const edrvfl_table* table,
                                           const char* config_json,
                                           char** out_json);

/* accuracy: row-major methods x datasets; out_ranks: methods entries. */
EDRVFL_API edrvfl_status edrvfl_average_ranks(const double* accuracy,
                                              int32_t methods,
                                              int32_t datasets,
                                              double* out_ranks);

/* Two-sided Wilcoxon signed-rank test on paired samples. out_statistic
 * receives the positive-difference rank sum. */
EDRVFL_API edrvfl_status edrvfl_wilcoxon(const double* a, const double* b,
                                         int64_t n, double* out_statistic,
                                         double* out_p_value);

#ifdef __cplusplus
}
#endif

#endif /* EDRVFL_H */
