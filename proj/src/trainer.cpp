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

#include "ovrkit/trainer.hpp"

#include <cmath>
#include <optional>

#include "ovrkit/error.hpp"
#include "ovrkit/parallel.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {

CGrid::CGrid(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), "C grid must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(values_[i] > 0 && std::isfinite(values_[i]), "C grid values must be positive and finite");
    if (i > 0) require(values_[i] > values_[i - 1], "C grid must be strictly increasing");
  }
}

CGrid CGrid::default_grid() {
  std::vector<double> v;
  for (int e = -10; e <= 10; ++e) v.push_back(std::ldexp(1.0, e));
  return CGrid(std::move(v));
}

bool CGrid::contains(double C) const {
  for (double v : values_)
    if (v == C) return true;
  return false;
}

std::string CGrid::describe() const {
  std::string out = "C=";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ',';
    out += text::format_double(values_[i]);
  }
  return out;
}

double ConfusionTally::f1() const {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<ConfusionTally> cross_validate(const SparseDataset& train, LabelId label,
                                           std::span<const CostPoint> points, const FoldPlan& folds,
                                           const SolverOptions& solver, bool warm_start) {
  require(folds.size() == train.n_instances(), "fold plan size differs from training set size");
  std::vector<ConfusionTally> tallies(points.size());
  if (train.label_frequency(label) == 0) return tallies;
  for (std::size_t f = 0; f < folds.k; ++f) {
    const auto val_rows = folds.validation(f);
    const BinaryProblem problem(train, label, folds.training(f));
    std::optional<BinaryModel> previous;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const BinaryModel* init = (warm_start && previous) ? &*previous : nullptr;
      BinaryModel m = train_binary(problem, points[p].C, points[p].t, solver, init);
      for (std::size_t i : val_rows) {
        const bool predicted = m.decision_value(train.row(i)) >= 0;
        const bool actual = train.has_label(i, label);
        tallies[p].tp += predicted && actual;
        tallies[p].fp += predicted && !actual;
        tallies[p].fn += !predicted && actual;
      }
      previous = std::move(m);
    }
  }
  return tallies;
}

OvRModel train_ovr_basic(const SparseDataset& train, double C, const TrainOptions& options) {
  require(train.n_instances() > 0, "training set is empty");
  OvRModel model;
  model.n_features = train.n_features();
  model.strategy = TrainStrategy::kBasic;
  model.provenance.grid = "C=" + text::format_double(C);
  model.models.resize(train.n_labels());
  parallel_for(train.n_labels(), options.threads, [&](std::size_t j) {
    model.models[j] = train_binary(BinaryProblem(train, static_cast<LabelId>(j)), C, 1.0, options.solver);
  });
  return model;
}

std::vector<CvScore> cv_f1_for_C(const SparseDataset& train, LabelId label, const CGrid& grid,
                                 const FoldPlan& folds, const SolverOptions& solver) {
  std::vector<CostPoint> points;
  for (double C : grid.values()) points.push_back({C, 1.0});
  const auto tallies = cross_validate(train, label, points, folds, solver, /*warm_start=*/true);
  std::vector<CvScore> out;
  for (std::size_t p = 0; p < points.size(); ++p) out.push_back({points[p].C, tallies[p].f1()});
  return out;
}

std::size_t select_best(std::span<const double> scores, std::size_t fallback) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return scores.empty() || scores[best] <= 0.0 ? fallback : best;
}

OvRModel train_ovr_basic_C(const SparseDataset& train, const CGrid& grid, const FoldPlan& folds,
                           const TrainOptions& options, CalibrationReport* report) {
  require(train.n_instances() > 0, "training set is empty");
  OvRModel model;
  model.n_features = train.n_features();
  model.strategy = TrainStrategy::kBasicC;
  model.provenance.seed = folds.seed;
  model.provenance.fold_digest = digest(folds);
  model.provenance.grid = grid.describe();
  model.models.resize(train.n_labels());
  std::vector<LabelCalibration> records(train.n_labels());

  parallel_for(train.n_labels(), options.threads, [&](std::size_t j) {
    const auto label = static_cast<LabelId>(j);
    const auto scores = cv_f1_for_C(train, label, grid, folds, options.solver);
    std::vector<double> f1s;
    for (const auto& s : scores) f1s.push_back(s.cv_f1);
    const std::size_t best = select_best(f1s, scores.size());
    const double C = best < scores.size() ? scores[best].C : 1.0;
    model.models[j] = train_binary(BinaryProblem(train, label), C, 1.0, options.solver);
    records[j].label = label;
    records[j].C = C;
    records[j].cv_f1 = best < scores.size() ? scores[best].cv_f1 : 0.0;
  });

  if (report) {
    report->strategy = TrainStrategy::kBasicC;
    report->labels = std::move(records);
  }
  return model;
}

}  // namespace ovrkit
