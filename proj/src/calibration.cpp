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

#include "ovrkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ovrkit/error.hpp"
#include "ovrkit/parallel.hpp"
#include "ovrkit/rng.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {

ThresholdSweep sweep_threshold(std::span<const ScoredValue> values) {
  require(!values.empty(), "threshold sweep needs at least one value");
  std::vector<ScoredValue> sorted(values.begin(), values.end());
  for (const auto& v : sorted) require(std::isfinite(v.value), "threshold sweep needs finite values");
  std::sort(sorted.begin(), sorted.end(), [](const ScoredValue& a, const ScoredValue& b) { return a.value > b.value; });

  // Distinct values in descending order with their positive / negative counts.
  struct Group {
    double value;
    std::size_t pos = 0;
    std::size_t neg = 0;
  };
  std::vector<Group> groups;
  std::size_t total_pos = 0;
  for (const auto& v : sorted) {
    if (groups.empty() || groups.back().value != v.value) groups.push_back({v.value});
    (v.positive ? groups.back().pos : groups.back().neg) += 1;
    total_pos += v.positive;
  }

  // Cut c predicts the top c groups positive; c = 0 predicts nothing.
  std::size_t best_cut = 0;
  double best_f1 = 0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t c = 1; c <= groups.size(); ++c) {
    tp += groups[c - 1].pos;
    fp += groups[c - 1].neg;
    const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(tp + fp + total_pos);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_cut = c;
    }
  }

  double threshold;
  if (best_cut == 0) {
    const double top = groups.front().value;
    threshold = top + 1.0;
    if (!(threshold > top)) threshold = std::nextafter(top, std::numeric_limits<double>::infinity());
  } else if (best_cut == groups.size()) {
    const double bottom = groups.back().value;
    threshold = bottom - 1.0;
    if (!(threshold < bottom)) threshold = std::nextafter(bottom, -std::numeric_limits<double>::infinity());
  } else {
    const double hi = groups[best_cut - 1].value;
    const double lo = groups[best_cut].value;
    threshold = lo + (hi - lo) / 2.0;
    if (!(threshold > lo)) threshold = hi;  // adjacent doubles
  }
  return {-threshold, best_f1};
}

namespace {

// Shift contributed by one validation fold: the sweep shift, or minus the
// largest validation value when the sweep's F1 falls below fbr.
double fold_shift(const ThresholdSweep& sweep, double max_value, double fbr) {
  return sweep.best_f1 < fbr ? -max_value : sweep.delta;
}

struct FoldSweep {
  ThresholdSweep sweep;
  double max_value = 0;
  // Set when the fold's training part had no positives; such a fold
  // contributes a zero shift.
  bool degenerate = false;
};

// Trains on `train_rows`, sweeps on `val_rows`. Decision values exclude delta.
FoldSweep sweep_fold(const SparseDataset& data, LabelId label, std::vector<std::size_t> train_rows,
                     const std::vector<std::size_t>& val_rows, double C, const SolverOptions& solver,
                     std::vector<double>* val_decisions = nullptr) {
  const BinaryProblem problem(data, label, std::move(train_rows));
  const BinaryModel m = train_binary(problem, C, 1.0, solver);
  FoldSweep out;
  if (m.always_negative) {
    out.degenerate = true;
    if (val_decisions) val_decisions->assign(val_rows.size(), BinaryModel::kNegativeSentinel);
    return out;
  }
  std::vector<ScoredValue> scored;
  scored.reserve(val_rows.size());
  for (std::size_t i : val_rows) scored.push_back({m.decision_value(data.row(i)), data.has_label(i, label)});
  out.sweep = sweep_threshold(scored);
  out.max_value = -std::numeric_limits<double>::infinity();
  for (const auto& s : scored) out.max_value = std::max(out.max_value, s.value);
  if (val_decisions) {
    val_decisions->clear();
    for (const auto& s : scored) val_decisions->push_back(s.value);
  }
  return out;
}

double shift_for(const FoldSweep& f, double fbr) {
  return f.degenerate ? 0.0 : fold_shift(f.sweep, f.max_value, fbr);
}

std::vector<std::size_t> map_positions(const std::vector<std::size_t>& base, const std::vector<std::size_t>& pos) {
  std::vector<std::size_t> out;
  out.reserve(pos.size());
  for (std::size_t p : pos) out.push_back(base[p]);
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

OvRModel calibrate_thresholding(const SparseDataset& train, const ThresholdingOptions& options,
                                const FoldPlan& outer_folds, const TrainOptions& train_options,
                                CalibrationReport* report) {
  require(!options.fbr_candidates.empty(), "fbr candidate list must be nonempty");
  for (double fbr : options.fbr_candidates) require(fbr >= 0.0 && fbr <= 1.0, "fbr candidates must lie in [0, 1]");
  require(options.inner_k >= 2, "inner fold count must be at least 2");
  require(outer_folds.size() == train.n_instances(), "fold plan size differs from training set size");

  OvRModel model;
  model.n_features = train.n_features();
  model.strategy = TrainStrategy::kThresholding;
  model.provenance.seed = outer_folds.seed;
  model.provenance.fold_digest = digest(outer_folds);
  {
    std::string grid = "C=" + text::format_double(options.C) + ";fbr=";
    for (std::size_t i = 0; i < options.fbr_candidates.size(); ++i) {
      if (i) grid += ',';
      grid += text::format_double(options.fbr_candidates[i]);
    }
    model.provenance.grid = grid + ";inner_k=" + std::to_string(options.inner_k);
  }
  model.models.resize(train.n_labels());
  std::vector<LabelCalibration> records(train.n_labels());

  parallel_for(train.n_labels(), train_options.threads, [&](std::size_t j) {
    const auto label = static_cast<LabelId>(j);
    auto& rec = records[j];
    rec.label = label;
    rec.C = options.C;
    BinaryModel final_model = train_binary(BinaryProblem(train, label), options.C, 1.0, train_options.solver);
    if (final_model.always_negative) {
      rec.fbr = options.fbr_candidates.front();
      rec.fold_deltas.assign(outer_folds.k, 0.0);
      rec.fold_best_f1.assign(outer_folds.k, 0.0);
      model.models[j] = std::move(final_model);
      return;
    }

    const std::size_t n_fbr = options.fbr_candidates.size();
    std::vector<ConfusionTally> pooled(n_fbr);
    std::vector<FoldSweep> outer_sweeps(outer_folds.k);
    for (std::size_t f = 0; f < outer_folds.k; ++f) {
      const auto outer_train = outer_folds.training(f);
      const auto outer_val = outer_folds.validation(f);

      // Inner CV inside the outer training portion.
      const FoldPlan inner = make_folds(outer_train.size(), options.inner_k, derive_seed(outer_folds.seed, f));
      std::vector<FoldSweep> inner_sweeps;
      for (std::size_t g = 0; g < inner.k; ++g)
        inner_sweeps.push_back(sweep_fold(train, label, map_positions(outer_train, inner.training(g)),
                                          map_positions(outer_train, inner.validation(g)), options.C,
                                          train_options.solver));

      std::vector<double> val_decisions;
      outer_sweeps[f] =
          sweep_fold(train, label, outer_train, outer_val, options.C, train_options.solver, &val_decisions);

      for (std::size_t q = 0; q < n_fbr; ++q) {
        std::vector<double> shifts;
        for (const auto& s : inner_sweeps) shifts.push_back(shift_for(s, options.fbr_candidates[q]));
        const double delta = mean(shifts);
        for (std::size_t v = 0; v < outer_val.size(); ++v) {
          const bool predicted = val_decisions[v] + delta >= 0;
          const bool actual = train.has_label(outer_val[v], label);
          pooled[q].tp += predicted && actual;
          pooled[q].fp += predicted && !actual;
          pooled[q].fn += !predicted && actual;
        }
      }
    }

    std::vector<double> scores;
    for (const auto& t : pooled) scores.push_back(t.f1());
    const std::size_t best = select_best(scores, 0);
    const double fbr = options.fbr_candidates[best];

    for (const auto& s : outer_sweeps) {
      rec.fold_deltas.push_back(shift_for(s, fbr));
      rec.fold_best_f1.push_back(s.degenerate ? 0.0 : s.sweep.best_f1);
    }
    final_model.delta = mean(rec.fold_deltas);
    rec.fbr = fbr;
    rec.delta = final_model.delta;
    rec.cv_f1 = scores[best];
    model.models[j] = std::move(final_model);
  });

  if (report) {
    report->strategy = TrainStrategy::kThresholding;
    report->labels = std::move(records);
  }
  return model;
}

void CostGrid::validate() const {
  require(!pairs.empty(), "cost grid must be nonempty");
  for (const auto& p : pairs) {
    require(p.C > 0 && std::isfinite(p.C), "cost grid C values must be positive");
    require(p.t > 0 && p.t <= 1, "cost grid t values must lie in (0, 1]");
  }
}

std::string CostGrid::describe() const {
  std::string out;
  switch (kind) {
    case CostGridKind::kDense: out = "dense"; break;
    case CostGridKind::kSimple: out = "simple"; break;
    case CostGridKind::kCustom: out = "custom"; break;
  }
  out += fold_policy == FoldPolicy::kShared ? ";shared-folds;pairs=" : ";refold-per-pair;pairs=";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += ',';
    out += text::format_double(pairs[i].C) + '/' + text::format_double(pairs[i].t);
  }
  return out;
}

CostGrid build_cost_grid(CostGridKind kind) {
  CostGrid grid;
  grid.kind = kind;
  switch (kind) {
    case CostGridKind::kDense: {
      grid.fold_policy = FoldPolicy::kRefoldPerPair;
      const CGrid cs = CGrid::default_grid();
      for (int k = 1; k <= 10; ++k)
        for (double C : cs.values()) grid.pairs.push_back({C, k / 10.0});
      break;
    }
    case CostGridKind::kSimple: {
      grid.fold_policy = FoldPolicy::kShared;
      for (int k = 1; k <= 7; ++k) {
        const double t = k / 7.0;
        for (double base : {0.01, 0.1, 1.0, 10.0, 100.0}) grid.pairs.push_back({base / t, t});
      }
      break;
    }
    case CostGridKind::kCustom:
      fail(ErrorCode::kInvalidArgument, "custom cost grids are built by the caller");
  }
  return grid;
}

namespace {

// Pooled out-of-fold tallies for each pair under the refold-per-pair policy.
std::vector<ConfusionTally> refolded_tallies(const SparseDataset& train, LabelId label, const CostGrid& grid,
                                             const FoldPlan& folds, const SolverOptions& solver) {
  std::vector<ConfusionTally> tallies(grid.pairs.size());
  if (train.label_frequency(label) == 0) return tallies;
  std::vector<std::optional<BinaryModel>> previous(folds.k);
  for (std::size_t p = 0; p < grid.pairs.size(); ++p) {
    const auto& pair = grid.pairs[p];
    const bool chain = p > 0 && grid.pairs[p - 1].t == pair.t;
    const FoldPlan plan = make_folds(train.n_instances(), folds.k, derive_seed(folds.seed, p));
    for (std::size_t f = 0; f < plan.k; ++f) {
      const BinaryProblem problem(train, label, plan.training(f));
      const BinaryModel* init = (chain && previous[f]) ? &*previous[f] : nullptr;
      BinaryModel m = train_binary(problem, pair.C, pair.t, solver, init);
      for (std::size_t i : plan.validation(f)) {
        const bool predicted = m.decision_value(train.row(i)) >= 0;
        const bool actual = train.has_label(i, label);
        tallies[p].tp += predicted && actual;
        tallies[p].fp += predicted && !actual;
        tallies[p].fn += !predicted && actual;
      }
      previous[f] = std::move(m);
    }
  }
  return tallies;
}

}  // namespace

OvRModel calibrate_cost_sensitive(const SparseDataset& train, const CostGrid& grid, const FoldPlan& folds,
                                  const TrainOptions& train_options, CalibrationReport* report) {
  grid.validate();
  require(folds.size() == train.n_instances(), "fold plan size differs from training set size");
  const TrainStrategy strategy =
      grid.kind == CostGridKind::kSimple ? TrainStrategy::kCostSensitiveSimple : TrainStrategy::kCostSensitive;

  OvRModel model;
  model.n_features = train.n_features();
  model.strategy = strategy;
  model.provenance.seed = folds.seed;
  model.provenance.fold_digest = digest(folds);
  model.provenance.grid = grid.describe();
  model.models.resize(train.n_labels());
  std::vector<LabelCalibration> records(train.n_labels());

  parallel_for(train.n_labels(), train_options.threads, [&](std::size_t j) {
    const auto label = static_cast<LabelId>(j);
    const auto tallies = grid.fold_policy == FoldPolicy::kShared
                             ? cross_validate(train, label, grid.pairs, folds, train_options.solver, false)
                             : refolded_tallies(train, label, grid, folds, train_options.solver);
    std::optional<std::size_t> best;
    double best_f1 = 0;
    for (std::size_t p = 0; p < tallies.size(); ++p) {
      const double f1 = tallies[p].f1();
      if (f1 <= 0) continue;
      const auto& cand = grid.pairs[p];
      const bool better = !best || f1 > best_f1 ||
                          (f1 == best_f1 && (cand.t > grid.pairs[*best].t ||
                                             (cand.t == grid.pairs[*best].t && cand.C < grid.pairs[*best].C)));
      if (better) {
        best = p;
        best_f1 = f1;
      }
    }
    const CostPoint chosen = best ? grid.pairs[*best] : CostPoint{1.0, 1.0};
    model.models[j] = train_binary(BinaryProblem(train, label), chosen.C, chosen.t, train_options.solver);
    records[j].label = label;
    records[j].C = chosen.C;
    records[j].t = chosen.t;
    records[j].cv_f1 = best_f1;
  });

  if (report) {
    report->strategy = strategy;
    report->labels = std::move(records);
  }
  return model;
}

}  // namespace ovrkit
