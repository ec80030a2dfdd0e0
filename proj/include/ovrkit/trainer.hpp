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

#ifndef OVRKIT_TRAINER_HPP_
#define OVRKIT_TRAINER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/model.hpp"
#include "ovrkit/solver.hpp"

namespace ovrkit {

/// Strictly increasing, nonempty list of positive C values.
class CGrid {
 public:
  explicit CGrid(std::vector<double> values);

  /// 2^-10, 2^-9, ..., 2^10.
  static CGrid default_grid();

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool contains(double C) const;
  std::string describe() const;

 private:
  std::vector<double> values_;
};

struct TrainOptions {
  SolverOptions solver;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// TP/FP/FN for one label.
struct ConfusionTally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double f1() const;
  ConfusionTally& operator+=(const ConfusionTally& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

struct CostPoint {
  double C = 1;
  double t = 1;
};

/// Pooled out-of-fold sign-rule tallies for each point, in order. When
/// `warm_start` is set, within each fold the model for point p starts from
/// the solution for point p - 1. A label with no positives scores all zeros.
std::vector<ConfusionTally> cross_validate(const SparseDataset& train, LabelId label,
                                           std::span<const CostPoint> points, const FoldPlan& folds,
                                           const SolverOptions& solver, bool warm_start);

/// Fixed C, t = 1, delta = 0 for every label.
OvRModel train_ovr_basic(const SparseDataset& train, double C = 1.0, const TrainOptions& options = {});

struct CvScore {
  double C;
  double cv_f1;
};

/// Pooled out-of-fold F1 for each grid value; the C path is warm-started in
/// ascending order within every fold.
std::vector<CvScore> cv_f1_for_C(const SparseDataset& train, LabelId label, const CGrid& grid,
                                 const FoldPlan& folds, const SolverOptions& solver = {});

/// Index of the best score. Ties go to the first (smallest C); if every
/// score is zero, returns `fallback`.
std::size_t select_best(std::span<const double> scores, std::size_t fallback);

/// Per label: choose C by cross-validated F1, then retrain on all of `train`.
/// All-zero CV F1 falls back to C = 1; ties go to the smallest C.
OvRModel train_ovr_basic_C(const SparseDataset& train, const CGrid& grid, const FoldPlan& folds,
                           const TrainOptions& options = {}, CalibrationReport* report = nullptr);

}  // namespace ovrkit

#endif  // OVRKIT_TRAINER_HPP_
