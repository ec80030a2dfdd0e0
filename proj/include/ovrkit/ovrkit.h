/*
 * Copyright 2026 The ovrkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to ovrkit. Every function returns an ovr_status; on failure
 * ovr_last_error() describes the most recent error on the calling thread.
 * Strings returned through `char**` are owned by the caller and released
 * with ovr_string_free. Handles are released with their *_free function;
 * passing NULL to any *_free is a no-op.
 */

#ifndef OVRKIT_OVRKIT_H_
#define OVRKIT_OVRKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(OVRKIT_BUILDING)
#define OVR_API __declspec(dllexport)
#else
#define OVR_API __declspec(dllimport)
#endif
#else
#define OVR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ovr_status {
  OVR_OK = 0,
  OVR_INVALID_ARGUMENT = 1,
  OVR_IO = 2,
  OVR_PARSE = 3,
  OVR_DIMENSION = 4,
  OVR_SOLVER = 5,
  OVR_GROUND_TRUTH_GATE = 6,
  OVR_VERIFICATION = 7,
  OVR_INTERNAL = 99
} ovr_status;

typedef struct ovr_dataset ovr_dataset;
typedef struct ovr_model ovr_model;
typedef struct ovr_predictions ovr_predictions;

typedef struct ovr_dataset_info {
  size_t n_instances;
  size_t n_features;
  size_t n_labels;
  size_t empty_label_count;
} ovr_dataset_info;

typedef struct ovr_model_info {
  size_t n_features;
  size_t n_labels;
  uint64_t seed;
  const char* strategy; /* static string, valid for the handle's lifetime */
} ovr_model_info;

/* Log levels passed to the callback. */
enum { OVR_LOG_INFO = 0, OVR_LOG_WARNING = 1 };
typedef void (*ovr_log_fn)(int level, const char* message, void* user);

OVR_API const char* ovr_version(void);
OVR_API const char* ovr_last_error(void);
OVR_API void ovr_string_free(char* s);
/* NULL restores the default sink (warnings to stderr). */
OVR_API void ovr_set_log_callback(ovr_log_fn fn, void* user);

/* ---- data ---- */

/* n_features / n_labels of 0 mean "infer". */
OVR_API ovr_status ovr_dataset_load_svmlight(const char* path, int one_based_labels, int l2_normalize,
                                             size_t n_features, size_t n_labels, ovr_dataset** out);
OVR_API ovr_status ovr_dataset_load_dense(const char* feature_path, const char* label_path, int one_based_labels,
                                          int l2_normalize, ovr_dataset** out);
OVR_API ovr_status ovr_dataset_info_get(const ovr_dataset* data, ovr_dataset_info* out);
OVR_API ovr_status ovr_dataset_save_svmlight(const ovr_dataset* data, const char* path);
OVR_API ovr_status ovr_dataset_subset(const ovr_dataset* data, const size_t* indices, size_t n, ovr_dataset** out);
/* Writes the label set of instance i into `labels` (capacity `cap`); *count
 * receives the full size even when it exceeds cap. */
OVR_API ovr_status ovr_dataset_labels(const ovr_dataset* data, size_t i, uint32_t* labels, size_t cap, size_t* count);
OVR_API void ovr_dataset_free(ovr_dataset* data);

/* Split and fold plans in their text format. */
OVR_API ovr_status ovr_split_plan(size_t n_instances, uint64_t seed, double train_fraction, char** plan_text,
                                  char** digest);
OVR_API ovr_status ovr_fold_plan(size_t train_size, size_t k, uint64_t seed, char** plan_text, char** digest);
/* Applies a split plan text to a dataset. */
OVR_API ovr_status ovr_dataset_split(const ovr_dataset* data, const char* plan_text, ovr_dataset** train,
                                     ovr_dataset** test);

/* ---- training ---- */

/* strategy: basic | basic-C | thresholding | cost-sensitive |
 * cost-sensitive-simple. options_json (may be NULL) keys: C, c_grid, fbr,
 * inner_k, k_folds, seed, tolerance, max_iterations, threads.
 * report (may be NULL) receives the calibration report text. */
OVR_API ovr_status ovr_train(const ovr_dataset* train, const char* strategy, const char* options_json,
                             ovr_model** out, char** report);
OVR_API ovr_status ovr_model_save(const ovr_model* model, const char* path);
OVR_API ovr_status ovr_model_load(const char* path, ovr_model** out);
OVR_API ovr_status ovr_model_info_get(const ovr_model* model, ovr_model_info* out);
OVR_API void ovr_model_free(ovr_model* model);

/* ---- prediction ---- */

/* strategy: basic | no-empty | as-calibrated | cost-sensitive-no-empty |
 * top-k | unrealistic. top-k uses k. unrealistic reads the label counts of
 * `test` and is refused (OVR_GROUND_TRUTH_GATE) unless allow_ground_truth. */
OVR_API ovr_status ovr_predict(const ovr_model* model, const ovr_dataset* test, const char* strategy, size_t k,
                               int allow_ground_truth, ovr_predictions** out);
OVR_API ovr_status ovr_predictions_save(const ovr_predictions* p, const char* prediction_path,
                                        const char* decision_path);
OVR_API ovr_status ovr_predictions_size(const ovr_predictions* p, size_t* n_instances, size_t* n_labels);
OVR_API ovr_status ovr_predictions_labels(const ovr_predictions* p, size_t i, uint32_t* labels, size_t cap,
                                          size_t* count);
/* Metrics JSON of the predictions against the labels of `truth`. */
OVR_API ovr_status ovr_predictions_evaluate(const ovr_predictions* p, const ovr_dataset* truth, size_t k,
                                            char** metrics_json);
OVR_API void ovr_predictions_free(ovr_predictions* p);

/* ---- evaluation, experiments, verification ---- */

/* truth_path: svmlight file or label file (one line per instance).
 * prediction_path: prediction dump; decision_path (may be NULL): decision
 * TSV used for precision@k. If prediction_path is NULL the basic rule is
 * applied to the decisions. */
OVR_API ovr_status ovr_evaluate_files(const char* truth_path, int one_based_labels, size_t n_labels,
                                      const char* prediction_path, const char* decision_path, size_t k,
                                      char** metrics_json);
/* config_json is an experiment manifest; outputs may be NULL. */
OVR_API ovr_status ovr_run_experiment(const char* config_json, char** metrics_json, char** table);
/* Returns OVR_VERIFICATION when any check fails; the reports are still set. */
OVR_API ovr_status ovr_verify(uint64_t seed, size_t trials, char** report_json, char** report_text);

#ifdef __cplusplus
}
#endif

#endif /* OVRKIT_OVRKIT_H_ */
