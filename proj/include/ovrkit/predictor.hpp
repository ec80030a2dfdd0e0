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

#ifndef OVRKIT_PREDICTOR_HPP_
#define OVRKIT_PREDICTOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/model.hpp"

namespace ovrkit {

/// Row-major n_instances x n_labels matrix of decision values.
class DecisionMatrix {
 public:
  DecisionMatrix() = default;
  DecisionMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  DecisionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }

  friend bool operator==(const DecisionMatrix&, const DecisionMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

enum class PredictStrategy { kUnrealistic, kBasic, kNoEmpty, kAsCalibrated, kCostSensitiveNoEmpty, kTopK };

std::string_view to_string(PredictStrategy s);
PredictStrategy parse_predict_strategy(std::string_view name);

struct PredictionSet {
  DecisionMatrix decisions;
  LabelSets predicted;  // sorted label ids per instance
  PredictStrategy strategy = PredictStrategy::kBasic;
  /// True only for kUnrealistic, which consumes ground-truth label counts.
  bool used_ground_truth = false;
};

/// Entry (i, j) = w_j.x_i + bias_j + delta_j; -inf for always-negative labels.
/// Throws kDimension if `test` has more features than the model.
DecisionMatrix decision_matrix(const OvRModel& model, const SparseDataset& test, std::size_t threads = 0);

/// Label j predicted iff decision >= 0.
PredictionSet predict_basic(const DecisionMatrix& decisions);

/// As predict_basic, except an empty row gets its argmax label (smallest
/// index on ties).
PredictionSet predict_no_empty(const DecisionMatrix& decisions);

/// The K_i highest-scoring labels of row i (smallest index on ties). Uses the
/// true label counts of the test set and logs an audit warning every call.
PredictionSet predict_unrealistic(const DecisionMatrix& decisions, std::span<const std::size_t> true_label_counts);

/// The k highest-scoring labels of every row (smallest index on ties).
PredictionSet predict_top_k(const DecisionMatrix& decisions, std::size_t k);

/// Dispatches on `strategy`. kAsCalibrated is the sign rule over a model
/// whose deltas were calibrated; kCostSensitiveNoEmpty is the no-empty rule.
/// `k` is read by kTopK, `true_label_counts` by kUnrealistic.
PredictionSet predict(const DecisionMatrix& decisions, PredictStrategy strategy, std::size_t k = 0,
                      std::span<const std::size_t> true_label_counts = {});

/// Indices of the k largest entries of `row`, ascending by index.
LabelSet top_k_labels(std::span<const double> row, std::size_t k);

/// One line per instance: comma-separated labels, empty line for the empty set.
std::string to_prediction_dump(const LabelSets& predicted);
LabelSets parse_prediction_dump(std::string_view contents, std::size_t n_expected);

/// Tab-separated decision values, one row per instance.
std::string to_decision_tsv(const DecisionMatrix& decisions);
DecisionMatrix parse_decision_tsv(std::string_view contents);

}  // namespace ovrkit

#endif  // OVRKIT_PREDICTOR_HPP_
