// Copyright 2026 The ovrkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovrkit/ovrkit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "ovrkit/calibration.hpp"
#include "ovrkit/dataset.hpp"
#include "ovrkit/error.hpp"
#include "ovrkit/experiment.hpp"
#include "ovrkit/log.hpp"
#include "ovrkit/metrics.hpp"
#include "ovrkit/model.hpp"
#include "ovrkit/predictor.hpp"
#include "ovrkit/text.hpp"
#include "ovrkit/theory.hpp"
#include "ovrkit/trainer.hpp"

struct ovr_dataset {
  ovrkit::SparseDataset data;
};

struct ovr_model {
  ovrkit::OvRModel model;
};

struct ovr_predictions {
  ovrkit::PredictionSet set;
};

namespace {

using namespace ovrkit;

thread_local std::string g_last_error;

ovr_status set_error(ovr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
ovr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return OVR_OK;
  } catch (const Error& e) {
    return set_error(static_cast<ovr_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(OVR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(OVR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

void copy_labels(const LabelSet& set, uint32_t* labels, size_t cap, size_t* count) {
  need(count, "count");
  if (cap > 0) need(labels, "labels");
  *count = set.size();
  for (size_t j = 0; j < set.size() && j < cap; ++j) labels[j] = set[j];
}

using Json = nlohmann::json;

// Options for ovr_train; unknown keys are rejected.
struct CTrainOptions {
  double C = 1.0;
  std::vector<double> c_grid;
  ThresholdingOptions thresholding;
  std::size_t k_folds = 5;
  std::uint64_t seed = 0;
  TrainOptions train;
};

CTrainOptions parse_train_options(const char* json) {
  CTrainOptions o;
  if (!json || !*json) return o;
  Json j;
  try {
    j = Json::parse(json);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kParse, "options must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "C") {
        o.C = v.get<double>();
        o.thresholding.C = o.C;
      } else if (k == "c_grid") {
        o.c_grid = v.get<std::vector<double>>();
      } else if (k == "fbr") {
        o.thresholding.fbr_candidates = v.get<std::vector<double>>();
      } else if (k == "inner_k") {
        o.thresholding.inner_k = v.get<std::size_t>();
      } else if (k == "k_folds") {
        o.k_folds = v.get<std::size_t>();
      } else if (k == "seed") {
        o.seed = v.get<std::uint64_t>();
      } else if (k == "tolerance") {
        o.train.solver.tolerance = v.get<double>();
      } else if (k == "max_iterations") {
        o.train.solver.max_iterations = v.get<std::size_t>();
      } else if (k == "threads") {
        o.train.threads = v.get<std::size_t>();
      } else {
        fail(ErrorCode::kParse, "unknown training option '" + k + "'");
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad training option: ") + e.what());
  }
  return o;
}

OvRModel train_with(const SparseDataset& train, TrainStrategy strategy, const CTrainOptions& o,
                    CalibrationReport* report) {
  if (strategy == TrainStrategy::kBasic) return train_ovr_basic(train, o.C, o.train);
  const auto folds = make_folds(train.n_instances(), o.k_folds, o.seed);
  switch (strategy) {
    case TrainStrategy::kBasicC: {
      const CGrid grid = o.c_grid.empty() ? CGrid::default_grid() : CGrid(o.c_grid);
      return train_ovr_basic_C(train, grid, folds, o.train, report);
    }
    case TrainStrategy::kThresholding:
      return calibrate_thresholding(train, o.thresholding, folds, o.train, report);
    case TrainStrategy::kCostSensitive:
      return calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kDense), folds, o.train, report);
    case TrainStrategy::kCostSensitiveSimple:
      return calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kSimple), folds, o.train, report);
    case TrainStrategy::kBasic:
      break;
  }
  return train_ovr_basic(train, o.C, o.train);
}

LabelSets load_truth(const std::string& path, bool one_based, std::size_t* n_labels) {
  const auto contents = text::read_file(path);
  if (contents.find(':') != std::string::npos) {
    ParseOptions opts;
    opts.one_based_labels = one_based;
    if (*n_labels > 0) opts.n_labels = *n_labels;
    const auto data = parse_svmlight(contents, opts);
    *n_labels = data.n_labels();
    return data.label_sets();
  }
  auto sets = parse_label_file(contents, one_based);
  if (*n_labels == 0)
    for (const auto& s : sets)
      if (!s.empty()) *n_labels = std::max<std::size_t>(*n_labels, s.back() + 1);
  return sets;
}

}  // namespace

extern "C" {

const char* ovr_version(void) { return "1.0.0"; }

const char* ovr_last_error(void) { return g_last_error.c_str(); }

void ovr_string_free(char* s) { std::free(s); }

void ovr_set_log_callback(ovr_log_fn fn, void* user) {
  if (!fn) {
    set_log_sink({});
    return;
  }
  set_log_sink([fn, user](LogLevel level, std::string_view message) {
    const std::string m(message);
    fn(static_cast<int>(level), m.c_str(), user);
  });
}

ovr_status ovr_dataset_load_svmlight(const char* path, int one_based_labels, int l2_normalize, size_t n_features,
                                     size_t n_labels, ovr_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    ParseOptions opts;
    opts.one_based_labels = one_based_labels != 0;
    opts.l2_normalize = l2_normalize != 0;
    if (n_features > 0) opts.n_features = n_features;
    if (n_labels > 0) opts.n_labels = n_labels;
    *out = new ovr_dataset{load_svmlight(path, opts)};
  });
}

ovr_status ovr_dataset_load_dense(const char* feature_path, const char* label_path, int one_based_labels,
                                  int l2_normalize, ovr_dataset** out) {
  return guarded([&] {
    need(feature_path, "feature_path");
    need(label_path, "label_path");
    need(out, "out");
    ParseOptions opts;
    opts.one_based_labels = one_based_labels != 0;
    opts.l2_normalize = l2_normalize != 0;
    *out = new ovr_dataset{load_dense_pair(feature_path, label_path, opts)};
  });
}

ovr_status ovr_dataset_info_get(const ovr_dataset* data, ovr_dataset_info* out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    out->n_instances = data->data.n_instances();
    out->n_features = data->data.n_features();
    out->n_labels = data->data.n_labels();
    out->empty_label_count = data->data.empty_label_count();
  });
}

ovr_status ovr_dataset_save_svmlight(const ovr_dataset* data, const char* path) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    text::write_file(path, to_svmlight(data->data));
  });
}

ovr_status ovr_dataset_subset(const ovr_dataset* data, const size_t* indices, size_t n, ovr_dataset** out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    if (n > 0) need(indices, "indices");
    for (size_t i = 0; i < n; ++i)
      if (indices[i] >= data->data.n_instances()) fail(ErrorCode::kDimension, "subset index out of range");
    *out = new ovr_dataset{data->data.subset(std::span<const std::size_t>(indices, n))};
  });
}

ovr_status ovr_dataset_labels(const ovr_dataset* data, size_t i, uint32_t* labels, size_t cap, size_t* count) {
  return guarded([&] {
    need(data, "data");
    if (i >= data->data.n_instances()) fail(ErrorCode::kDimension, "instance index out of range");
    const auto l = data->data.labels(i);
    copy_labels(LabelSet(l.begin(), l.end()), labels, cap, count);
  });
}

void ovr_dataset_free(ovr_dataset* data) { delete data; }

ovr_status ovr_split_plan(size_t n_instances, uint64_t seed, double train_fraction, char** plan_text,
                          char** digest_out) {
  return guarded([&] {
    const auto plan = make_split(n_instances, seed, train_fraction);
    put(plan_text, to_text(plan));
    put(digest_out, digest(plan));
  });
}

ovr_status ovr_fold_plan(size_t train_size, size_t k, uint64_t seed, char** plan_text, char** digest_out) {
  return guarded([&] {
    const auto plan = make_folds(train_size, k, seed);
    put(plan_text, to_text(plan));
    put(digest_out, digest(plan));
  });
}

ovr_status ovr_dataset_split(const ovr_dataset* data, const char* plan_text, ovr_dataset** train,
                             ovr_dataset** test) {
  return guarded([&] {
    need(data, "data");
    need(plan_text, "plan_text");
    need(train, "train");
    need(test, "test");
    const auto plan = parse_split_plan(plan_text);
    if (plan.n_instances != data->data.n_instances())
      fail(ErrorCode::kDimension, "split plan covers " + std::to_string(plan.n_instances) +
                                      " instances but the dataset has " + std::to_string(data->data.n_instances()));
    auto tr = std::make_unique<ovr_dataset>(ovr_dataset{data->data.subset(plan.train_indices)});
    auto te = std::make_unique<ovr_dataset>(ovr_dataset{data->data.subset(plan.test_indices)});
    *train = tr.release();
    *test = te.release();
  });
}

ovr_status ovr_train(const ovr_dataset* train, const char* strategy, const char* options_json, ovr_model** out,
                     char** report) {
  return guarded([&] {
    need(train, "train");
    need(strategy, "strategy");
    need(out, "out");
    const auto s = parse_train_strategy(strategy);
    const auto options = parse_train_options(options_json);
    CalibrationReport rep;
    rep.strategy = s;
    auto model = std::make_unique<ovr_model>(ovr_model{train_with(train->data, s, options, &rep)});
    put(report, to_text(rep));
    *out = model.release();
  });
}

ovr_status ovr_model_save(const ovr_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    save_model(model->model, path);
  });
}

ovr_status ovr_model_load(const char* path, ovr_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ovr_model{load_model(path)};
  });
}

ovr_status ovr_model_info_get(const ovr_model* model, ovr_model_info* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    out->n_features = model->model.n_features;
    out->n_labels = model->model.n_labels();
    out->seed = model->model.provenance.seed;
    out->strategy = to_string(model->model.strategy).data();
  });
}

void ovr_model_free(ovr_model* model) { delete model; }

ovr_status ovr_predict(const ovr_model* model, const ovr_dataset* test, const char* strategy, size_t k,
                       int allow_ground_truth, ovr_predictions** out) {
  return guarded([&] {
    need(model, "model");
    need(test, "test");
    need(strategy, "strategy");
    need(out, "out");
    const auto s = parse_predict_strategy(strategy);
    if (s == PredictStrategy::kUnrealistic && !allow_ground_truth)
      fail(ErrorCode::kGroundTruthGate,
           "unrealistic prediction reads the true label count of every test instance; pass allow_ground_truth");
    if (test->data.n_labels() > model->model.n_labels() && s == PredictStrategy::kUnrealistic)
      fail(ErrorCode::kDimension, "test data has more labels than the model");
    const auto decisions = decision_matrix(model->model, test->data);
    std::vector<std::size_t> counts;
    if (s == PredictStrategy::kUnrealistic) counts = set_sizes(test->data.label_sets());
    *out = new ovr_predictions{predict(decisions, s, k, counts)};
  });
}

ovr_status ovr_predictions_save(const ovr_predictions* p, const char* prediction_path, const char* decision_path) {
  return guarded([&] {
    need(p, "predictions");
    if (prediction_path) text::write_file(prediction_path, to_prediction_dump(p->set.predicted));
    if (decision_path) text::write_file(decision_path, to_decision_tsv(p->set.decisions));
  });
}

ovr_status ovr_predictions_size(const ovr_predictions* p, size_t* n_instances, size_t* n_labels) {
  return guarded([&] {
    need(p, "predictions");
    if (n_instances) *n_instances = p->set.decisions.rows();
    if (n_labels) *n_labels = p->set.decisions.cols();
  });
}

ovr_status ovr_predictions_labels(const ovr_predictions* p, size_t i, uint32_t* labels, size_t cap, size_t* count) {
  return guarded([&] {
    need(p, "predictions");
    if (i >= p->set.predicted.size()) fail(ErrorCode::kDimension, "instance index out of range");
    copy_labels(p->set.predicted[i], labels, cap, count);
  });
}

ovr_status ovr_predictions_evaluate(const ovr_predictions* p, const ovr_dataset* truth, size_t k,
                                    char** metrics_json) {
  return guarded([&] {
    need(p, "predictions");
    need(truth, "truth");
    need(metrics_json, "metrics_json");
    const auto n_labels = std::max(truth->data.n_labels(), p->set.decisions.cols());
    auto report = evaluate(truth->data.label_sets(), p->set.predicted, n_labels, &p->set.decisions, k);
    report.strategy = std::string(to_string(p->set.strategy));
    report.used_ground_truth = p->set.used_ground_truth;
    put(metrics_json, to_json(report));
  });
}

void ovr_predictions_free(ovr_predictions* p) { delete p; }

ovr_status ovr_evaluate_files(const char* truth_path, int one_based_labels, size_t n_labels,
                              const char* prediction_path, const char* decision_path, size_t k,
                              char** metrics_json) {
  return guarded([&] {
    need(truth_path, "truth_path");
    need(metrics_json, "metrics_json");
    if (!prediction_path && !decision_path)
      fail(ErrorCode::kInvalidArgument, "evaluation needs a prediction dump or a decision file");
    std::size_t labels = n_labels;
    const auto truth = load_truth(truth_path, one_based_labels != 0, &labels);
    std::optional<DecisionMatrix> decisions;
    if (decision_path) {
      decisions = parse_decision_tsv(text::read_file(decision_path));
      if (decisions->rows() != truth.size())
        fail(ErrorCode::kDimension, "decision file has " + std::to_string(decisions->rows()) +
                                        " rows but truth has " + std::to_string(truth.size()));
      labels = std::max(labels, decisions->cols());
    }
    LabelSets predicted;
    std::string strategy = "file";
    if (prediction_path) {
      predicted = parse_prediction_dump(text::read_file(prediction_path), truth.size());
    } else {
      predicted = predict_basic(*decisions).predicted;
      strategy = "basic";
    }
    for (const auto& s : predicted)
      if (!s.empty()) labels = std::max<std::size_t>(labels, s.back() + 1);
    auto report = evaluate(truth, predicted, labels, decisions ? &*decisions : nullptr, k);
    report.strategy = strategy;
    put(metrics_json, to_json(report));
  });
}

ovr_status ovr_run_experiment(const char* config_json, char** metrics_json, char** table) {
  return guarded([&] {
    need(config_json, "config_json");
    const auto result = run_experiment(parse_experiment_config(config_json));
    put(metrics_json, result.metrics_json);
    put(table, result.table);
  });
}

ovr_status ovr_verify(uint64_t seed, size_t trials, char** report_json, char** report_text) {
  bool ok = true;
  const auto status = guarded([&] {
    if (trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be at least 1");
    const auto report = theory::verify_all(seed, trials);
    put(report_json, theory::to_json(report));
    put(report_text, theory::to_text(report));
    ok = report.passed();
  });
  if (status != OVR_OK) return status;
  if (!ok) return set_error(OVR_VERIFICATION, "a theorem check failed; see the report for the counterexample");
  return OVR_OK;
}

}  // extern "C"
