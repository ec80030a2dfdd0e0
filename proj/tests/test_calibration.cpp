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

#include <gtest/gtest.h>

#include <random>

#include "ovrkit/calibration.hpp"
#include "ovrkit/error.hpp"
#include "ovrkit/metrics.hpp"
#include "ovrkit/predictor.hpp"
#include "support.hpp"

namespace ovrkit {
namespace {

using testing::QuietLog;

std::size_t predicted_count(const std::vector<ScoredValue>& v, double delta) {
  std::size_t n = 0;
  for (const auto& s : v) n += s.value + delta >= 0;
  return n;
}

TEST(Sweep, HandFixture) {
  const std::vector<ScoredValue> v{{1.0, true}, {0.6, true}, {0.2, false}, {-0.3, false}};
  const auto r = sweep_threshold(v);
  EXPECT_DOUBLE_EQ(r.delta, -0.4);
  EXPECT_EQ(r.best_f1, 1.0);
}

TEST(Sweep, AllPositiveAndNoPositive) {
  const std::vector<ScoredValue> pos{{0.5, true}, {-2.0, true}};
  const auto a = sweep_threshold(pos);
  EXPECT_EQ(a.best_f1, 1.0);
  EXPECT_EQ(predicted_count(pos, a.delta), 2u);
  const std::vector<ScoredValue> neg{{0.5, false}, {-2.0, false}};
  const auto b = sweep_threshold(neg);
  EXPECT_EQ(b.best_f1, 0.0);
  EXPECT_EQ(predicted_count(neg, b.delta), 0u);
}

TEST(Sweep, RejectsNonFinite) {
  const std::vector<ScoredValue> v{{std::numeric_limits<double>::infinity(), true}};
  EXPECT_THROW(sweep_threshold(v), Error);
}

// Exhaustive-cut oracle on random lists with repeated values.
TEST(Sweep, MatchesExhaustiveCutOracle) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> len(1, 50), level(-6, 6);
    std::bernoulli_distribution coin(0.3);
    const int n = len(gen);
    std::vector<ScoredValue> v;
    std::vector<std::pair<double, bool>> raw;
    for (int i = 0; i < n; ++i) {
      const double x = 0.25 * level(gen);
      const bool p = coin(gen);
      v.push_back({x, p});
      raw.emplace_back(x, p);
    }
    const auto oracle = testing::exhaustive_cut(raw);
    const auto r = sweep_threshold(v);
    EXPECT_DOUBLE_EQ(r.best_f1, oracle.best_f1) << "trial " << trial;
    EXPECT_EQ(predicted_count(v, r.delta), oracle.best_count) << "trial " << trial;
  }
}

TEST(Sweep, ShiftMovesDeltaOnly) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n;
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoredValue> v, w;
    const double c = 4 * n(gen);
    for (int i = 0; i < 30; ++i) {
      const double x = n(gen);
      const bool p = coin(gen);
      v.push_back({x, p});
      w.push_back({x + c, p});
    }
    const auto a = sweep_threshold(v);
    const auto b = sweep_threshold(w);
    EXPECT_EQ(a.best_f1, b.best_f1);
    EXPECT_NEAR(b.delta, a.delta - c, 1e-9);
  }
}

TEST(CostGrid, DenseAndSimpleShapes) {
  const auto dense = build_cost_grid(CostGridKind::kDense);
  EXPECT_EQ(dense.pairs.size(), 210u);
  EXPECT_EQ(dense.fold_policy, FoldPolicy::kRefoldPerPair);
  const auto simple = build_cost_grid(CostGridKind::kSimple);
  ASSERT_EQ(simple.pairs.size(), 35u);
  EXPECT_EQ(simple.fold_policy, FoldPolicy::kShared);
  for (const auto* g : {&dense, &simple}) {
    bool unit = false;
    for (const auto& p : g->pairs) unit |= std::abs(p.C - 1.0) < 1e-12 && std::abs(p.t - 1.0) < 1e-12;
    EXPECT_TRUE(unit);
  }
  for (int i = 1; i <= 7; ++i) {
    const double t = i / 7.0;
    for (double c : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      bool found = false;
      for (const auto& p : simple.pairs) found |= std::abs(p.t - t) < 1e-12 && std::abs(p.C - c / t) < 1e-9 * c / t;
      EXPECT_TRUE(found) << "t=" << t << " C=" << c / t;
    }
  }
  EXPECT_THROW(build_cost_grid(CostGridKind::kCustom), Error);
  CostGrid bad{{{1.0, 1.5}}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(CostSensitive, UnitGridEqualsBasic) {
  QuietLog quiet;
  const auto d = testing::random_dataset(40, 80, 5, 2);
  const auto folds = make_folds(d.n_instances(), 5, 0);
  const auto cs = calibrate_cost_sensitive(d, CostGrid{{{1.0, 1.0}}}, folds);
  const auto basic = train_ovr_basic(d);
  for (LabelId j = 0; j < 2; ++j) {
    EXPECT_EQ(cs.models[j].w, basic.models[j].w);
    EXPECT_EQ(cs.models[j].bias, basic.models[j].bias);
  }
}

TEST(CostSensitive, SelectedPairNoWorseThanUnit) {
  QuietLog quiet;
  const auto d = testing::random_dataset(41, 150, 6, 3);
  const auto folds = make_folds(d.n_instances(), 5, 4);
  CalibrationReport report;
  calibrate_cost_sensitive(d, build_cost_grid(CostGridKind::kSimple), folds, {}, &report);
  const std::vector<CostPoint> unit{{1.0, 1.0}};
  for (LabelId j = 0; j < 3; ++j)
    EXPECT_GE(report.labels[j].cv_f1, cross_validate(d, j, unit, folds, {}, false)[0].f1() - 1e-12);
}

TEST(CostSensitive, ImbalancedFixturePicksSmallT) {
  QuietLog quiet;
  const auto train = testing::shifted_separable(3, 10, 270);
  const auto folds = make_folds(train.n_instances(), 5, 7);
  CalibrationReport report;
  const auto m = calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kSimple), folds, {}, &report);
  EXPECT_EQ(m.strategy, TrainStrategy::kCostSensitiveSimple);
  for (const auto& l : report.labels) EXPECT_EQ(l.cv_f1, 1.0);
  const auto p = predict_basic(decision_matrix(m, train));
  std::size_t positives = 0;
  for (const auto& s : p.predicted) positives += s.size();
  EXPECT_EQ(positives, 30u);
}

TEST(Thresholding, DeltaIsMeanOfFoldDeltas) {
  QuietLog quiet;
  const auto train = testing::shifted_separable(2, 10, 100);
  const auto folds = make_folds(train.n_instances(), 5, 3);
  ThresholdingOptions o;
  o.fbr_candidates = {0.1};
  CalibrationReport report;
  const auto m = calibrate_thresholding(train, o, folds, {}, &report);
  for (LabelId j = 0; j < 2; ++j) {
    const auto& l = report.labels[j];
    ASSERT_EQ(l.fold_deltas.size(), 5u);
    double mean = 0;
    for (double x : l.fold_deltas) mean += x;
    mean /= 5;
    EXPECT_NEAR(m.models[j].delta, mean, 1e-12);
    for (std::size_t f = 0; f < 5; ++f) {
      bool any = false;
      for (auto i : folds.validation(f)) any = any || train.has_label(i, j);
      EXPECT_EQ(l.fold_best_f1[f], any ? 1.0 : 0.0) << "fold " << f;
    }
  }
}

TEST(Thresholding, LabelWithoutPositivesPredictsNothing) {
  QuietLog quiet;
  const auto base = testing::shifted_separable(2, 10, 100);
  // Widen the vocabulary by one label that never occurs.
  std::vector<SparseRow> rows;
  for (std::size_t i = 0; i < base.n_instances(); ++i) rows.emplace_back(base.row(i).begin(), base.row(i).end());
  const SparseDataset d(2, 3, std::move(rows), base.label_sets());
  const auto folds = make_folds(d.n_instances(), 5, 3);
  const auto m = calibrate_thresholding(d, {}, folds);
  const auto p = predict_basic(decision_matrix(m, d));
  for (const auto& s : p.predicted)
    for (auto l : s) EXPECT_NE(l, 2u);
}

TEST(Thresholding, ShiftedSeparableFixture) {
  QuietLog quiet;
  const auto train = testing::shifted_separable(3, 10, 270);
  const auto test = testing::shifted_separable(3, 5, 135);
  const auto folds = make_folds(train.n_instances(), 5, 7);
  const auto truth = test.label_sets();

  const auto basic = predict_basic(decision_matrix(train_ovr_basic(train), test));
  EXPECT_EQ(evaluate(truth, basic.predicted, 3).macro_f1, 0.0);

  const auto thr = calibrate_thresholding(train, {}, folds);
  EXPECT_EQ(thr.strategy, TrainStrategy::kThresholding);
  EXPECT_EQ(evaluate(truth, predict_basic(decision_matrix(thr, test)).predicted, 3).macro_f1, 1.0);

  const auto cs = calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kDense), folds);
  EXPECT_EQ(evaluate(truth, predict_basic(decision_matrix(cs, test)).predicted, 3).macro_f1, 1.0);
}

TEST(Thresholding, DeterministicForFixedFolds) {
  QuietLog quiet;
  const auto d = testing::random_dataset(50, 120, 6, 2);
  const auto folds = make_folds(d.n_instances(), 5, 1);
  EXPECT_EQ(to_text(calibrate_thresholding(d, {}, folds)), to_text(calibrate_thresholding(d, {}, folds)));
  const auto grid = build_cost_grid(CostGridKind::kDense);
  EXPECT_EQ(to_text(calibrate_cost_sensitive(d, grid, folds)), to_text(calibrate_cost_sensitive(d, grid, folds)));
}

}  // namespace
}  // namespace ovrkit
