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

#ifndef OVRKIT_CALIBRATION_HPP_
#define OVRKIT_CALIBRATION_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/model.hpp"
#include "ovrkit/trainer.hpp"

namespace ovrkit {

struct ScoredValue {
  double value;
  bool positive;
};

struct ThresholdSweep {
  double delta = 0;
  double best_f1 = 0;
};

/// Chooses the shift delta maximizing F1 of the rule `value + delta >= 0`.
///
/// Candidate thresholds are the midpoints between adjacent distinct values,
/// one threshold below the minimum and one above the maximum; delta is the
/// negated threshold. Among equally good thresholds the one predicting the
/// fewest positives wins, so a list without positives yields the threshold
/// above the maximum and best_f1 = 0. Values must be finite.
ThresholdSweep sweep_threshold(std::span<const ScoredValue> values);

struct ThresholdingOptions {
  double C = 1.0;
  std::vector<double> fbr_candidates{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t inner_k = 3;
};

/// Two-level CV thresholding with the fbr rule, per label:
///  - outer CV picks the fbr candidate whose pooled validation F1 is best,
///    where each outer fold's shift is the mean of inner-fold sweep shifts
///    (an inner fold whose best F1 is below fbr contributes minus its
///    largest validation decision value);
///  - the final model is trained on all of `train` at options.C and its
///    delta is the mean over outer folds of the same rule applied to the
///    outer validation folds with the chosen fbr.
/// Inner folds for outer fold f are drawn with derive_seed(outer.seed, f).
OvRModel calibrate_thresholding(const SparseDataset& train, const ThresholdingOptions& options,
                                const FoldPlan& outer_folds, const TrainOptions& train_options = {},
                                CalibrationReport* report = nullptr);

enum class FoldPolicy { kShared, kRefoldPerPair };
enum class CostGridKind { kDense, kSimple, kCustom };

struct CostGrid {
  std::vector<CostPoint> pairs;
  FoldPolicy fold_policy = FoldPolicy::kShared;
  CostGridKind kind = CostGridKind::kCustom;

  /// Throws unless every C > 0 and t in (0, 1] and the grid is nonempty.
  void validate() const;
  std::string describe() const;
};

/// kDense: t in {0.1, ..., 1.0} x the default C grid, refolded per pair.
/// kSimple: t in {1/7, ..., 1} x C in {0.01/t, 0.1/t, 1/t, 10/t, 100/t}, shared folds.
CostGrid build_cost_grid(CostGridKind kind);

/// Per label: pick the (C, t) pair with the best pooled out-of-fold F1 and
/// retrain on all of `train` with C+ = C(2 - t), C- = C t. Ties prefer the
/// larger t, then the smaller C; an all-zero label falls back to (1, 1).
/// With kRefoldPerPair, pair p uses folds drawn with derive_seed(folds.seed, p)
/// and warm-starts from the previous pair when it has the same t.
OvRModel calibrate_cost_sensitive(const SparseDataset& train, const CostGrid& grid, const FoldPlan& folds,
                                  const TrainOptions& train_options = {}, CalibrationReport* report = nullptr);

}  // namespace ovrkit

#endif  // OVRKIT_CALIBRATION_HPP_
