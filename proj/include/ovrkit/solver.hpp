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

#ifndef OVRKIT_SOLVER_HPP_
#define OVRKIT_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ovrkit/dataset.hpp"

namespace ovrkit {

/// Per-class loss weights. from_ct maps (C, t) to C+ = C(2 - t), C- = C t.
struct LossWeights {
  double c_pos = 1.0;
  double c_neg = 1.0;

  static LossWeights from_ct(double C, double t) { return {C * (2.0 - t), C * t}; }
};

/// One label's binary view over (a subset of) a shared dataset.
/// y[k] = +1 iff `label` is in the label set of instance rows[k].
class BinaryProblem {
 public:
  /// All instances of `data`.
  BinaryProblem(const SparseDataset& data, LabelId label);
  /// Instances data[rows[k]].
  BinaryProblem(const SparseDataset& data, LabelId label, std::vector<std::size_t> rows);
  /// Explicit signs, independent of the dataset's label sets.
  BinaryProblem(const SparseDataset& data, std::vector<std::size_t> rows, std::vector<std::int8_t> y);

  const SparseDataset& data() const { return *data_; }
  LabelId label() const { return label_; }
  std::size_t size() const { return rows_.size(); }
  std::size_t n_features() const { return data_->n_features(); }
  std::span<const Feature> x(std::size_t k) const { return data_->row(rows_[k]); }
  std::int8_t y(std::size_t k) const { return y_[k]; }
  std::size_t n_positive() const { return n_positive_; }
  std::size_t n_negative() const { return rows_.size() - n_positive_; }

 private:
  const SparseDataset* data_;
  LabelId label_ = 0;
  std::vector<std::size_t> rows_;
  std::vector<std::int8_t> y_;
  std::size_t n_positive_ = 0;
};

struct SolverOptions {
  /// Stop when |grad f(w)| <= tolerance * max(1, |grad f(0)|).
  double tolerance = 1e-4;
  int max_iterations = 1000;
  /// Intercept as an extra coordinate fixed at feature value 1; it is
  /// regularized like the weights.
  bool use_bias = true;
};

struct TrainDiagnostics {
  int iterations = 0;
  double gradient_norm = 0;
  double initial_gradient_norm = 0;  // at w = 0
};

struct BinaryModel {
  std::vector<double> w;
  double bias = 0;
  double delta = 0;
  double C = 1;
  double t = 1;
  /// Set when the training problem had no positives; the model then
  /// predicts negative everywhere and its decision value is -inf.
  bool always_negative = false;
  TrainDiagnostics diagnostics;

  static constexpr double kNegativeSentinel = -std::numeric_limits<double>::infinity();

  /// w.x + bias + delta, or -inf for an always-negative model.
  double decision_value(std::span<const Feature> x) const;
};

struct ObjectiveValue {
  double value = 0;
  std::vector<double> grad_w;
  double grad_bias = 0;
};

/// f(w, b) = (w.w + b^2)/2 + C+ sum_{y=+1} log(1+e^{-z}) + C- sum_{y=-1} log(1+e^{z}),
/// z = w.x + b. With use_bias = false the b terms are dropped and grad_bias = 0.
ObjectiveValue objective_and_gradient(const BinaryProblem& problem, std::span<const double> w, double bias,
                                      LossWeights weights, bool use_bias = true);

inline ObjectiveValue objective_and_gradient(const BinaryProblem& problem, std::span<const double> w,
                                             double bias, double C, double t, bool use_bias = true) {
  return objective_and_gradient(problem, w, bias, LossWeights::from_ct(C, t), use_bias);
}

/// Minimizes the objective above with a trust-region Newton method (conjugate
/// gradient inner solves). Throws ErrorCode::kSolver if the gradient
/// certificate is not met within max_iterations, and kInvalidArgument for
/// non-finite features, an empty problem, or out-of-range C / t.
/// A problem with no positives yields an always-negative model without
/// solving.
BinaryModel train_binary(const BinaryProblem& problem, double C, double t, const SolverOptions& options = {},
                         const BinaryModel* warm_start = nullptr);

/// Same, with explicit class weights; the model records (C, t) as given.
BinaryModel train_binary_weighted(const BinaryProblem& problem, LossWeights weights, double C, double t,
                                  const SolverOptions& options = {}, const BinaryModel* warm_start = nullptr);

/// Numerically stable log(1 + e^{-z}).
double logistic_loss(double z);

}  // namespace ovrkit

#endif  // OVRKIT_SOLVER_HPP_
