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

#include "ovrkit/predictor.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "ovrkit/error.hpp"
#include "ovrkit/log.hpp"
#include "ovrkit/parallel.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {
namespace {

constexpr std::array<std::pair<PredictStrategy, std::string_view>, 6> kNames{{
    {PredictStrategy::kUnrealistic, "unrealistic"},
    {PredictStrategy::kBasic, "basic"},
    {PredictStrategy::kNoEmpty, "no-empty"},
    {PredictStrategy::kAsCalibrated, "as-calibrated"},
    {PredictStrategy::kCostSensitiveNoEmpty, "cost-sensitive-no-empty"},
    {PredictStrategy::kTopK, "top-k"},
}};

PredictionSet with_decisions(const DecisionMatrix& d, PredictStrategy s) {
  PredictionSet out;
  out.decisions = d;
  out.strategy = s;
  out.predicted.resize(d.rows());
  return out;
}

}  // namespace

std::string_view to_string(PredictStrategy s) {
  for (const auto& [k, name] : kNames)
    if (k == s) return name;
  return "unknown";
}

PredictStrategy parse_predict_strategy(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  fail(ErrorCode::kInvalidArgument, "unknown prediction strategy '" + std::string(name) + "'");
}

DecisionMatrix::DecisionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require(values_.size() == rows * cols, "decision matrix size mismatch");
}

DecisionMatrix decision_matrix(const OvRModel& model, const SparseDataset& test, std::size_t threads) {
  if (test.n_features() > model.n_features)
    fail(ErrorCode::kDimension, "test data has " + std::to_string(test.n_features()) +
                                    " features but the model has " + std::to_string(model.n_features));
  DecisionMatrix out(test.n_instances(), model.n_labels());
  constexpr std::size_t kBlock = 256;
  const std::size_t n_blocks = (test.n_instances() + kBlock - 1) / kBlock;
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(test.n_instances(), (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i)
      for (std::size_t j = 0; j < model.n_labels(); ++j) out(i, j) = model.models[j].decision_value(test.row(i));
  });
  return out;
}

PredictionSet predict_basic(const DecisionMatrix& decisions) {
  auto out = with_decisions(decisions, PredictStrategy::kBasic);
  for (std::size_t i = 0; i < decisions.rows(); ++i)
    for (std::size_t j = 0; j < decisions.cols(); ++j)
      if (decisions(i, j) >= 0) out.predicted[i].push_back(static_cast<LabelId>(j));
  return out;
}

PredictionSet predict_no_empty(const DecisionMatrix& decisions) {
  require(decisions.cols() >= 1, "no-empty prediction needs at least one label");
  auto out = predict_basic(decisions);
  out.strategy = PredictStrategy::kNoEmpty;
  for (std::size_t i = 0; i < decisions.rows(); ++i) {
    if (!out.predicted[i].empty()) continue;
    const auto row = decisions.row(i);
    // max_element returns the first maximum, i.e. the smallest index.
    out.predicted[i].push_back(static_cast<LabelId>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return out;
}

LabelSet top_k_labels(std::span<const double> row, std::size_t k) {
  require(k <= row.size(), "k = " + std::to_string(k) + " exceeds the number of labels " + std::to_string(row.size()));
  std::vector<LabelId> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](LabelId a, LabelId b) { return row[a] > row[b]; });
  LabelSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

PredictionSet predict_unrealistic(const DecisionMatrix& decisions, std::span<const std::size_t> true_label_counts) {
  require(true_label_counts.size() == decisions.rows(), "label-count list length differs from instance count");
  log_warning(
      "unrealistic prediction: ground-truth label counts of the test set were used; "
      "scores are not a valid estimate of deployed performance");
  auto out = with_decisions(decisions, PredictStrategy::kUnrealistic);
  out.used_ground_truth = true;
  for (std::size_t i = 0; i < decisions.rows(); ++i) {
    if (true_label_counts[i] > decisions.cols())
      fail(ErrorCode::kInvalidArgument, "instance " + std::to_string(i) + " has K = " +
                                            std::to_string(true_label_counts[i]) + " > n_labels");
    out.predicted[i] = top_k_labels(decisions.row(i), true_label_counts[i]);
  }
  return out;
}

PredictionSet predict_top_k(const DecisionMatrix& decisions, std::size_t k) {
  require(k <= decisions.cols(), "k exceeds the number of labels");
  auto out = with_decisions(decisions, PredictStrategy::kTopK);
  for (std::size_t i = 0; i < decisions.rows(); ++i) out.predicted[i] = top_k_labels(decisions.row(i), k);
  return out;
}

PredictionSet predict(const DecisionMatrix& decisions, PredictStrategy strategy, std::size_t k,
                      std::span<const std::size_t> true_label_counts) {
  PredictionSet out;
  switch (strategy) {
    case PredictStrategy::kUnrealistic: return predict_unrealistic(decisions, true_label_counts);
    case PredictStrategy::kBasic: return predict_basic(decisions);
    case PredictStrategy::kNoEmpty: return predict_no_empty(decisions);
    case PredictStrategy::kAsCalibrated: out = predict_basic(decisions); break;
    case PredictStrategy::kCostSensitiveNoEmpty: out = predict_no_empty(decisions); break;
    case PredictStrategy::kTopK: return predict_top_k(decisions, k);
  }
  out.strategy = strategy;
  return out;
}

std::string to_prediction_dump(const LabelSets& predicted) {
  std::string out;
  for (const auto& ls : predicted) {
    for (std::size_t k = 0; k < ls.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(ls[k]);
    }
    out += '\n';
  }
  return out;
}

LabelSets parse_prediction_dump(std::string_view contents, std::size_t n_expected) {
  LabelSets out = parse_label_file(contents, false);
  while (out.size() > n_expected && out.back().empty()) out.pop_back();
  if (out.size() != n_expected)
    fail(ErrorCode::kDimension, "prediction dump has " + std::to_string(out.size()) + " rows, expected " +
                                    std::to_string(n_expected));
  return out;
}

std::string to_decision_tsv(const DecisionMatrix& decisions) {
  std::string out;
  for (std::size_t i = 0; i < decisions.rows(); ++i) {
    for (std::size_t j = 0; j < decisions.cols(); ++j) {
      if (j) out += '\t';
      out += text::format_double(decisions(i, j));
    }
    out += '\n';
  }
  return out;
}

DecisionMatrix parse_decision_tsv(std::string_view contents) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0, line_no = 0;
  for (auto line : text::split(contents, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty()) continue;
    const auto tokens = text::split_ws(line);
    if (rows == 0) cols = tokens.size();
    if (tokens.size() != cols) throw ParseError(line_no, "ragged decision row");
    for (auto tok : tokens) {
      const auto v = text::parse_double(tok);
      if (!v) throw ParseError(line_no, "malformed decision value '" + std::string(tok) + "'");
      values.push_back(*v);
    }
    ++rows;
  }
  return DecisionMatrix(rows, cols, std::move(values));
}

}  // namespace ovrkit
