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

#include "ovrkit/error.hpp"
#include "ovrkit/model.hpp"
#include "ovrkit/trainer.hpp"
#include "support.hpp"

namespace ovrkit {
namespace {

using testing::QuietLog;

// Label 0 is positive exactly when feature 0 is positive; label 1 never
// occurs.
SparseDataset separable(std::size_t n) {
  std::vector<SparseRow> rows;
  LabelSets labels;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.1 * static_cast<double>(i % 7));
    rows.push_back({{0, x}, {1, 0.3 * static_cast<double>(i % 3)}});
    labels.push_back(x > 0 ? LabelSet{0} : LabelSet{});
  }
  return SparseDataset(2, 2, std::move(rows), std::move(labels));
}

TEST(CGrid, ValidatesAndDescribes) {
  EXPECT_THROW(CGrid({}), Error);
  EXPECT_THROW(CGrid({1.0, 1.0}), Error);
  EXPECT_THROW(CGrid({2.0, 1.0}), Error);
  EXPECT_THROW(CGrid({0.0, 1.0}), Error);
  const auto g = CGrid::default_grid();
  ASSERT_EQ(g.size(), 21u);
  EXPECT_DOUBLE_EQ(g.values().front(), 1.0 / 1024.0);
  EXPECT_DOUBLE_EQ(g.values().back(), 1024.0);
  EXPECT_TRUE(g.contains(1.0));
}

TEST(SelectBest, TiesGoFirstAndZerosFallBack) {
  const std::vector<double> tie{0.2, 0.5, 0.5, 0.1};
  EXPECT_EQ(select_best(tie, 3), 1u);
  const std::vector<double> zeros{0, 0, 0};
  EXPECT_EQ(select_best(zeros, 2), 2u);
}

TEST(TrainBasic, OneModelPerLabelMatchingSolver) {
  QuietLog quiet;
  const auto d = testing::random_dataset(4, 80, 5, 3);
  const auto m = train_ovr_basic(d);
  ASSERT_EQ(m.n_labels(), 3u);
  EXPECT_EQ(m.strategy, TrainStrategy::kBasic);
  for (LabelId j = 0; j < 3; ++j) {
    EXPECT_EQ(m.models[j].C, 1.0);
    EXPECT_EQ(m.models[j].t, 1.0);
    EXPECT_EQ(m.models[j].delta, 0.0);
    const auto solo = train_binary(BinaryProblem(d, j), 1.0, 1.0);
    for (std::size_t i = 0; i < d.n_instances(); ++i)
      EXPECT_DOUBLE_EQ(m.models[j].decision_value(d.row(i)), solo.decision_value(d.row(i)));
  }
}

TEST(TrainBasic, LabelWithoutPositivesIsAlwaysNegative) {
  QuietLog quiet;
  const auto m = train_ovr_basic(separable(20));
  EXPECT_FALSE(m.models[0].always_negative);
  EXPECT_TRUE(m.models[1].always_negative);
}

TEST(CvF1, SeparableLabelReachesOne) {
  QuietLog quiet;
  const auto d = separable(40);
  const auto folds = make_folds(d.n_instances(), 5, 1);
  const auto scores = cv_f1_for_C(d, 0, CGrid::default_grid(), folds);
  ASSERT_EQ(scores.size(), 21u);
  double best = 0;
  for (const auto& s : scores) best = std::max(best, s.cv_f1);
  EXPECT_EQ(best, 1.0);
  for (const auto& s : cv_f1_for_C(d, 1, CGrid::default_grid(), folds)) EXPECT_EQ(s.cv_f1, 0.0);
}

// Independent 5-fold CV at C = 1 built from train_binary directly.
TEST(CvF1, SingleValueGridEqualsPlainCv) {
  QuietLog quiet;
  const auto d = testing::random_dataset(12, 120, 6, 2);
  const auto folds = make_folds(d.n_instances(), 5, 8);
  for (LabelId j = 0; j < 2; ++j) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t f = 0; f < 5; ++f) {
      const auto model = train_binary(BinaryProblem(d, j, folds.training(f)), 1.0, 1.0);
      for (auto i : folds.validation(f)) {
        const bool pred = model.decision_value(d.row(i)) >= 0;
        const bool truth = d.has_label(i, j);
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
      }
    }
    const double oracle = testing::oracle_f1(static_cast<long>(tp), static_cast<long>(fp), static_cast<long>(fn));
    const auto scores = cv_f1_for_C(d, j, CGrid({1.0}), folds);
    ASSERT_EQ(scores.size(), 1u);
    EXPECT_DOUBLE_EQ(scores[0].cv_f1, oracle);
  }
}

TEST(CvF1, DeterministicAcrossRuns) {
  QuietLog quiet;
  const auto d = testing::random_dataset(13, 100, 6, 1);
  const auto folds = make_folds(d.n_instances(), 5, 2);
  const auto a = cv_f1_for_C(d, 0, CGrid::default_grid(), folds);
  const auto b = cv_f1_for_C(d, 0, CGrid::default_grid(), folds);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].cv_f1, b[k].cv_f1);
}

TEST(TrainBasicC, SelectsSeparatingCAndFallsBack) {
  QuietLog quiet;
  const auto d = separable(40);
  const auto folds = make_folds(d.n_instances(), 5, 1);
  CalibrationReport report;
  const auto m = train_ovr_basic_C(d, CGrid::default_grid(), folds, {}, &report);
  EXPECT_EQ(m.strategy, TrainStrategy::kBasicC);
  ASSERT_EQ(report.labels.size(), 2u);
  EXPECT_EQ(report.labels[0].cv_f1, 1.0);
  // Ties resolve to the smallest C reaching F1 = 1.
  const auto scores = cv_f1_for_C(d, 0, CGrid::default_grid(), folds);
  for (const auto& s : scores) {
    if (s.cv_f1 == 1.0) {
      EXPECT_EQ(m.models[0].C, s.C);
      break;
    }
  }
  for (std::size_t i = 0; i < d.n_instances(); ++i)
    EXPECT_EQ(m.models[0].decision_value(d.row(i)) >= 0, d.has_label(i, 0));
  EXPECT_EQ(m.models[1].C, 1.0);
  EXPECT_EQ(m.provenance.fold_digest, digest(folds));
}

TEST(TrainBasicC, NeverWorseThanBasicOnSameFolds) {
  QuietLog quiet;
  const auto d = testing::random_dataset(17, 150, 6, 3);
  const auto folds = make_folds(d.n_instances(), 5, 3);
  const std::vector<CostPoint> unit{{1.0, 1.0}};
  CalibrationReport report;
  train_ovr_basic_C(d, CGrid::default_grid(), folds, {}, &report);
  for (LabelId j = 0; j < 3; ++j) {
    const auto basic = cross_validate(d, j, unit, folds, {}, false)[0].f1();
    EXPECT_GE(report.labels[j].cv_f1, basic - 1e-12);
  }
}

TEST(Model, TextRoundTripIsExact) {
  QuietLog quiet;
  const auto d = testing::random_dataset(19, 60, 5, 3);
  auto m = train_ovr_basic(d, 0.37);
  m.models[1].delta = -0.123456789012345;
  m.provenance.seed = 42;
  const auto text = to_text(m);
  const auto back = parse_model(text);
  EXPECT_EQ(to_text(back), text);
  ASSERT_EQ(back.n_labels(), 3u);
  for (LabelId j = 0; j < 3; ++j) {
    EXPECT_EQ(back.models[j].w, m.models[j].w);
    EXPECT_EQ(back.models[j].bias, m.models[j].bias);
    EXPECT_EQ(back.models[j].delta, m.models[j].delta);
  }
  EXPECT_EQ(back.provenance.seed, 42u);
  EXPECT_THROW(parse_model("not a model\n"), Error);
}

}  // namespace
}  // namespace ovrkit
