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

// Synthetic checks of three facts about Micro-F1 on multi-label predictions:
//   (bound)    Micro-F1 <= 2 sum min(K_hat_i, K_i) / sum (K_i + K_hat_i) <= 1
//   (ranking)  if every true label outranks every false label, predicting the
//              top K_hat_i labels attains that bound, and no other prediction
//              with the same sizes does better
//   (accuracy) on single-label truth and predictions, accuracy == Micro-F1

#ifndef OVRKIT_THEORY_HPP_
#define OVRKIT_THEORY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/predictor.hpp"

namespace ovrkit::theory {

struct SyntheticRanking {
  std::size_t n_instances = 0;
  std::size_t n_labels = 0;
  LabelSets truth;
  DecisionMatrix decisions;
  bool perfect = false;
};

/// Each label is true with probability `label_density`. True labels score
/// in [0.5, 1), false labels in [0, 0.5), so the ranking is strictly
/// separated on every row.
SyntheticRanking gen_perfect_ranking(std::uint64_t seed, std::size_t n_instances, std::size_t n_labels,
                                     double label_density);

/// Min over true labels > max over false labels, on every row.
bool is_perfectly_ranked(const SyntheticRanking& r);

struct TheoremReport {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::size_t equality_cases = 0;
  double min_slack = 0;        // smallest (bound - value); negative means violated
  double max_abs_error = 0;    // largest |value - expected| for equality checks
  std::size_t brute_force_instances = 0;
  std::size_t brute_force_subsets = 0;
  std::string counterexample;  // first violation, if any

  bool passed() const { return violations == 0; }
};

TheoremReport check_theorem1(std::uint64_t seed, std::size_t trials);
TheoremReport check_theorem2(std::uint64_t seed, std::size_t trials);
TheoremReport check_theorem3(std::uint64_t seed, std::size_t trials);

struct OverestimationRow {
  double noise = 0;
  double unrealistic = 0;
  double basic = 0;
  double no_empty = 0;
  double thresholded = 0;
  double gap = 0;  // unrealistic - basic
  bool true_label_below_boundary = false;
};

struct OverestimationReport {
  std::uint64_t seed = 0;
  std::size_t n_instances = 0;
  std::size_t n_labels = 0;
  double sign_boundary = 0;
  std::vector<OverestimationRow> rows;
};

/// Micro-F1 of unrealistic (top-K_i), sign-rule, no-empty and per-label
/// thresholded predictions on synthetic rankings shifted by -sign_boundary,
/// with a per-instance probability `noise` of swapping one true-label score
/// with one false-label score. Thresholds come from an independent draw.
OverestimationReport overestimation_demo(std::uint64_t seed, const std::vector<double>& noise_levels = {0.0, 0.1, 0.2, 0.4});

struct VerifyReport {
  std::vector<TheoremReport> theorems;
  OverestimationReport demo;

  bool passed() const;
};

VerifyReport verify_all(std::uint64_t seed, std::size_t trials);

std::string to_json(const VerifyReport& report);
std::string to_text(const VerifyReport& report);

}  // namespace ovrkit::theory

#endif  // OVRKIT_THEORY_HPP_
