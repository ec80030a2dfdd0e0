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

#ifndef OVRKIT_METRICS_HPP_
#define OVRKIT_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/predictor.hpp"

namespace ovrkit {

// All F1-style ratios define 0/0 as 0.

struct ConfusionCounts {
  std::vector<std::size_t> tp, fp, fn;  // per label
  std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;

  std::size_t n_labels() const { return tp.size(); }
};

ConfusionCounts confusion(const LabelSets& truth, const LabelSets& predicted, std::size_t n_labels);

/// Mean over every label of the vocabulary, including labels absent from
/// the test data.
double macro_f1(const ConfusionCounts& counts);
double micro_f1(const ConfusionCounts& counts);
double instance_f1(const LabelSets& truth, const LabelSets& predicted);

/// 2 sum min(K_hat_i, K_i) / sum (K_i + K_hat_i); 0 when the denominator is 0.
double micro_upper_bound(std::span<const std::size_t> K, std::span<const std::size_t> K_hat);

/// Fraction of exact matches; every truth and prediction must be a singleton.
double multiclass_accuracy(const LabelSets& truth, const LabelSets& predicted);

/// Mean over instances of |top-k(decisions_i) ∩ truth_i| / k.
double precision_at_k(const LabelSets& truth, const DecisionMatrix& decisions, std::size_t k);

std::vector<std::size_t> set_sizes(const LabelSets& sets);

struct MetricsReport {
  double macro_f1 = 0;
  double micro_f1 = 0;
  double instance_f1 = 0;
  std::optional<double> accuracy;  // present when the data is single-label throughout
  std::optional<double> precision_at_k;
  std::size_t k = 0;
  double micro_upper_bound = 0;
  bool micro_within_bound = true;
  std::size_t n_test = 0;
  std::size_t n_labels = 0;
  std::string strategy;
  bool used_ground_truth = false;
};

/// Computes every applicable measure. precision@k is included when
/// `decisions` is given and 1 <= k <= n_labels.
MetricsReport evaluate(const LabelSets& truth, const LabelSets& predicted, std::size_t n_labels,
                       const DecisionMatrix* decisions = nullptr, std::size_t k = 0);

/// Flat key-value JSON document; keys are emitted in a fixed order so equal
/// reports serialize to identical bytes.
std::string to_json(const MetricsReport& report);

}  // namespace ovrkit

#endif  // OVRKIT_METRICS_HPP_
