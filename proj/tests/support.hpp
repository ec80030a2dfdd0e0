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

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Nothing here calls the library routine it is used to check.

#ifndef OVRKIT_TESTS_SUPPORT_HPP_
#define OVRKIT_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ovrkit/dataset.hpp"
#include "ovrkit/log.hpp"
#include "ovrkit/solver.hpp"
#include "ovrkit/trainer.hpp"

namespace ovrkit::testing {

// Silences the library log for the lifetime of the object.
struct QuietLog {
  QuietLog() {
    set_log_sink([](LogLevel, std::string_view) {});
  }
  ~QuietLog() { set_log_sink({}); }
};

// Rare labels, one indicator feature each: instance with label j has
// x_j = scale and nothing else; the remaining instances are all-zero with no
// labels. Positives of j outrank every negative of j under any model with
// w_jj > 0, but at C = 1 all decision values stay below zero when
// scale = 0.5, positives = 10, empty = 270.
inline SparseDataset shifted_separable(std::size_t n_labels, std::size_t positives, std::size_t empty,
                                       double scale = 0.5) {
  std::vector<SparseRow> rows;
  LabelSets labels;
  for (std::size_t j = 0; j < n_labels; ++j)
    for (std::size_t i = 0; i < positives; ++i) {
      rows.push_back({{static_cast<FeatureId>(j), scale}});
      labels.push_back({static_cast<LabelId>(j)});
    }
  for (std::size_t i = 0; i < empty; ++i) {
    rows.push_back({});
    labels.push_back({});
  }
  return SparseDataset(n_labels, n_labels, std::move(rows), std::move(labels));
}

// Dense-ish random multi-label data: each label j has a random direction;
// an instance carries j when its projection plus noise is positive.
inline SparseDataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t n_labels,
                                    double density = 0.6) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> dirs(n_labels, std::vector<double>(d));
  for (auto& v : dirs)
    for (auto& x : v) x = normal(gen);
  std::vector<SparseRow> rows;
  LabelSets labels;
  for (std::size_t i = 0; i < n; ++i) {
    SparseRow row;
    std::vector<double> dense(d, 0.0);
    for (std::size_t f = 0; f < d; ++f)
      if (unit(gen) < density) {
        dense[f] = normal(gen);
        row.push_back({static_cast<FeatureId>(f), dense[f]});
      }
    LabelSet ls;
    for (std::size_t j = 0; j < n_labels; ++j) {
      double z = 0;
      for (std::size_t f = 0; f < d; ++f) z += dirs[j][f] * dense[f];
      if (z + 0.5 * normal(gen) > 0.8) ls.push_back(static_cast<LabelId>(j));
    }
    rows.push_back(std::move(row));
    labels.push_back(std::move(ls));
  }
  return SparseDataset(d, n_labels, std::move(rows), std::move(labels));
}

// Random label sets over `n_labels` labels, each label present with
// probability p.
inline LabelSets random_label_sets(std::mt19937_64& gen, std::size_t n, std::size_t n_labels, double p) {
  std::bernoulli_distribution coin(p);
  LabelSets out(n);
  for (auto& s : out)
    for (std::size_t j = 0; j < n_labels; ++j)
      if (coin(gen)) s.push_back(static_cast<LabelId>(j));
  return out;
}

// ---- metric oracle: per-cell indicator counting, no set algebra ----

struct OracleCounts {
  std::vector<long> tp, fp, fn;
};

inline bool member(const LabelSet& s, std::size_t j) {
  for (auto l : s)
    if (l == j) return true;
  return false;
}

inline OracleCounts oracle_counts(const LabelSets& truth, const LabelSets& pred, std::size_t n_labels) {
  OracleCounts c{std::vector<long>(n_labels), std::vector<long>(n_labels), std::vector<long>(n_labels)};
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t j = 0; j < n_labels; ++j) {
      const bool t = member(truth[i], j), p = member(pred[i], j);
      c.tp[j] += t && p;
      c.fp[j] += !t && p;
      c.fn[j] += t && !p;
    }
  return c;
}

inline double oracle_f1(long tp, long fp, long fn) {
  const long den = 2 * tp + fp + fn;
  return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

inline double oracle_macro(const OracleCounts& c) {
  double s = 0;
  for (std::size_t j = 0; j < c.tp.size(); ++j) s += oracle_f1(c.tp[j], c.fp[j], c.fn[j]);
  return s / static_cast<double>(c.tp.size());
}

inline double oracle_micro(const OracleCounts& c) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < c.tp.size(); ++j) {
    tp += c.tp[j];
    fp += c.fp[j];
    fn += c.fn[j];
  }
  return oracle_f1(tp, fp, fn);
}

inline double oracle_instance(const LabelSets& truth, const LabelSets& pred, std::size_t n_labels) {
  if (truth.empty()) return 0;
  double s = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    long both = 0, t = 0, p = 0;
    for (std::size_t j = 0; j < n_labels; ++j) {
      both += member(truth[i], j) && member(pred[i], j);
      t += member(truth[i], j);
      p += member(pred[i], j);
    }
    s += (t + p) == 0 ? 0.0 : 2.0 * static_cast<double>(both) / static_cast<double>(t + p);
  }
  return s / static_cast<double>(truth.size());
}

// precision@k by selection: repeatedly take the largest remaining value,
// lowest index first on ties.
inline double oracle_precision_at_k(const LabelSets& truth, const std::vector<std::vector<double>>& scores,
                                    std::size_t k) {
  if (truth.empty()) return 0;
  double s = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    std::vector<bool> taken(scores[i].size(), false);
    long hits = 0;
    for (std::size_t r = 0; r < k; ++r) {
      std::size_t best = scores[i].size();
      for (std::size_t j = 0; j < scores[i].size(); ++j)
        if (!taken[j] && (best == scores[i].size() || scores[i][j] > scores[i][best])) best = j;
      taken[best] = true;
      hits += member(truth[i], best);
    }
    s += static_cast<double>(hits) / static_cast<double>(k);
  }
  return s / static_cast<double>(truth.size());
}

// ---- threshold oracle: F1 of every cut "predict the top m values" ----

struct CutOracle {
  double best_f1 = 0;
  std::size_t best_count = 0;  // fewest positives among optimal cuts
};

// Cuts can only fall between distinct values, so only counts m where
// sorted[m-1] > sorted[m] (or m = 0, m = n) are realizable.
inline CutOracle exhaustive_cut(std::vector<std::pair<double, bool>> values) {
  std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  long total_pos = 0;
  for (const auto& v : values) total_pos += v.second;
  CutOracle best{0.0, 0};
  bool have = false;
  for (std::size_t m = 0; m <= values.size(); ++m) {
    if (m > 0 && m < values.size() && values[m - 1].first == values[m].first) continue;
    long tp = 0;
    for (std::size_t i = 0; i < m; ++i) tp += values[i].second;
    const double f = oracle_f1(tp, static_cast<long>(m) - tp, total_pos - tp);
    if (!have || f > best.best_f1) {
      best = {f, m};
      have = true;
    }
  }
  return best;
}

// ---- solver oracle: bisection on the 1-D stationarity condition ----

// Root of g(w) = w - C / (1 + e^w) on [0, C]: the minimizer of
// w^2/2 + C log(1 + e^-w).
inline double bisect_single_positive(double C) {
  double lo = 0, hi = C;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid - C / (1 + std::exp(mid)) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Largest |cold - warm| decision value on `held_out` along the ascending
// default C grid for label 0 of `train`. Each solve uses a tolerance small
// enough that 1-strong convexity bounds the gap by `certified`:
// |theta - theta*| <= |grad| and |decision gap| <= 2 |grad| max|x~|.
inline double warm_cold_gap(const SparseDataset& train, const SparseDataset& held_out, double certified) {
  double xmax = 0;
  for (std::size_t i = 0; i < held_out.n_instances(); ++i) {
    double sq = 1.0;  // bias coordinate
    for (const auto& x : held_out.row(i)) sq += x.value * x.value;
    xmax = std::max(xmax, std::sqrt(sq));
  }
  const BinaryProblem p(train, 0);
  const std::vector<double> zero(train.n_features(), 0.0);
  const auto grid = CGrid::default_grid();
  BinaryModel prev;
  bool have = false;
  double worst = 0;
  for (double C : grid.values()) {
    const auto g = objective_and_gradient(p, zero, 0.0, C, 1.0);
    double g0 = g.grad_bias * g.grad_bias;
    for (double x : g.grad_w) g0 += x * x;
    SolverOptions o;
    o.tolerance = std::min(1e-4, certified / (2.0 * xmax * std::max(1.0, std::sqrt(g0))));
    const auto cold = train_binary(p, C, 1.0, o);
    const auto warm = train_binary(p, C, 1.0, o, have ? &prev : nullptr);
    for (std::size_t i = 0; i < held_out.n_instances(); ++i)
      worst = std::max(worst, std::abs(cold.decision_value(held_out.row(i)) - warm.decision_value(held_out.row(i))));
    prev = warm;
    have = true;
  }
  return worst;
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("ovrkit_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace ovrkit::testing

#endif  // OVRKIT_TESTS_SUPPORT_HPP_
