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

#include "ovrkit/metrics.hpp"

#include <algorithm>

#include "json.hpp"
#include "ovrkit/error.hpp"

namespace ovrkit {
namespace {

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  return ratio(2.0 * static_cast<double>(tp), static_cast<double>(2 * tp + fp + fn));
}

std::size_t intersection_size(const LabelSet& a, const LabelSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

void check_aligned(const LabelSets& truth, const LabelSets& predicted) {
  if (truth.size() != predicted.size())
    fail(ErrorCode::kDimension, "truth has " + std::to_string(truth.size()) + " instances but predictions have " +
                                    std::to_string(predicted.size()));
}

}  // namespace

ConfusionCounts confusion(const LabelSets& truth, const LabelSets& predicted, std::size_t n_labels) {
  check_aligned(truth, predicted);
  ConfusionCounts c;
  c.tp.assign(n_labels, 0);
  c.fp.assign(n_labels, 0);
  c.fn.assign(n_labels, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i];
    const auto& p = predicted[i];
    for (LabelId l : t) require(l < n_labels, "truth label out of range");
    for (LabelId l : p) {
      require(l < n_labels, "predicted label out of range");
      (std::binary_search(t.begin(), t.end(), l) ? c.tp[l] : c.fp[l]) += 1;
    }
    for (LabelId l : t)
      if (!std::binary_search(p.begin(), p.end(), l)) c.fn[l] += 1;
  }
  for (std::size_t j = 0; j < n_labels; ++j) {
    c.tp_sum += c.tp[j];
    c.fp_sum += c.fp[j];
    c.fn_sum += c.fn[j];
  }
  return c;
}

double macro_f1(const ConfusionCounts& counts) {
  require(counts.n_labels() >= 1, "Macro-F1 needs at least one label");
  double sum = 0;
  for (std::size_t j = 0; j < counts.n_labels(); ++j) sum += f1(counts.tp[j], counts.fp[j], counts.fn[j]);
  return sum / static_cast<double>(counts.n_labels());
}

double micro_f1(const ConfusionCounts& counts) { return f1(counts.tp_sum, counts.fp_sum, counts.fn_sum); }

double instance_f1(const LabelSets& truth, const LabelSets& predicted) {
  check_aligned(truth, predicted);
  if (truth.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    sum += ratio(2.0 * static_cast<double>(intersection_size(truth[i], predicted[i])),
                 static_cast<double>(truth[i].size() + predicted[i].size()));
  return sum / static_cast<double>(truth.size());
}

double micro_upper_bound(std::span<const std::size_t> K, std::span<const std::size_t> K_hat) {
  require(K.size() == K_hat.size(), "K and K_hat differ in length");
  std::size_t num = 0, den = 0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    num += std::min(K[i], K_hat[i]);
    den += K[i] + K_hat[i];
  }
  return ratio(2.0 * static_cast<double>(num), static_cast<double>(den));
}

double multiclass_accuracy(const LabelSets& truth, const LabelSets& predicted) {
  check_aligned(truth, predicted);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != 1 || predicted[i].size() != 1)
      fail(ErrorCode::kInvalidArgument, "accuracy requires single-label truth and prediction (instance " +
                                            std::to_string(i) + ")");
    correct += truth[i][0] == predicted[i][0];
  }
  return ratio(static_cast<double>(correct), static_cast<double>(truth.size()));
}

double precision_at_k(const LabelSets& truth, const DecisionMatrix& decisions, std::size_t k) {
  require(k >= 1, "precision@k needs k >= 1");
  if (k > decisions.cols()) fail(ErrorCode::kInvalidArgument, "k exceeds the number of labels");
  if (truth.size() != decisions.rows()) fail(ErrorCode::kDimension, "truth and decisions differ in row count");
  if (truth.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    sum += static_cast<double>(intersection_size(top_k_labels(decisions.row(i), k), truth[i])) /
           static_cast<double>(k);
  return sum / static_cast<double>(truth.size());
}

std::vector<std::size_t> set_sizes(const LabelSets& sets) {
  std::vector<std::size_t> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.size());
  return out;
}

MetricsReport evaluate(const LabelSets& truth, const LabelSets& predicted, std::size_t n_labels,
                       const DecisionMatrix* decisions, std::size_t k) {
  const auto counts = confusion(truth, predicted, n_labels);
  MetricsReport r;
  r.n_test = truth.size();
  r.n_labels = n_labels;
  r.macro_f1 = n_labels > 0 ? macro_f1(counts) : 0.0;
  r.micro_f1 = micro_f1(counts);
  r.instance_f1 = instance_f1(truth, predicted);
  const auto K = set_sizes(truth);
  const auto K_hat = set_sizes(predicted);
  r.micro_upper_bound = micro_upper_bound(K, K_hat);
  r.micro_within_bound = r.micro_f1 <= r.micro_upper_bound + 1e-12;
  const bool single = !truth.empty() && std::all_of(K.begin(), K.end(), [](std::size_t s) { return s == 1; }) &&
                      std::all_of(K_hat.begin(), K_hat.end(), [](std::size_t s) { return s == 1; });
  if (single) r.accuracy = multiclass_accuracy(truth, predicted);
  if (decisions && k >= 1 && k <= decisions->cols()) {
    r.k = k;
    r.precision_at_k = precision_at_k(truth, *decisions, k);
  }
  return r;
}

std::string to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["n_test"] = r.n_test;
  j["n_labels"] = r.n_labels;
  j["strategy"] = r.strategy;
  j["ground_truth_used"] = r.used_ground_truth;
  j["macro_f1"] = r.macro_f1;
  j["micro_f1"] = r.micro_f1;
  j["instance_f1"] = r.instance_f1;
  j["accuracy"] = r.accuracy ? nlohmann::ordered_json(*r.accuracy) : nlohmann::ordered_json(nullptr);
  j["precision_at_k"] = r.precision_at_k ? nlohmann::ordered_json(*r.precision_at_k) : nlohmann::ordered_json(nullptr);
  j["k"] = r.k;
  j["micro_upper_bound"] = r.micro_upper_bound;
  j["micro_within_bound"] = r.micro_within_bound;
  return j.dump(2) + "\n";
}

}  // namespace ovrkit
