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

#include "ovrkit/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "ovrkit/calibration.hpp"
#include "ovrkit/error.hpp"
#include "ovrkit/metrics.hpp"
#include "ovrkit/rng.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit::theory {
namespace {

constexpr double kTol = 1e-12;
constexpr std::size_t kBruteForceMaxLabels = 6;

std::string describe_sets(const LabelSets& sets) {
  std::string out = "[";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (i) out += ' ';
    out += '{';
    for (std::size_t k = 0; k < sets[i].size(); ++k) {
      if (k) out += ',';
      out += std::to_string(sets[i][k]);
    }
    out += '}';
  }
  return out + "]";
}

LabelSet random_subset(Rng& rng, std::size_t n_labels, double density) {
  LabelSet s;
  for (std::size_t j = 0; j < n_labels; ++j)
    if (rng.uniform() < density) s.push_back(static_cast<LabelId>(j));
  return s;
}

double micro_of(const LabelSets& truth, const LabelSets& pred, std::size_t n_labels) {
  return micro_f1(confusion(truth, pred, n_labels));
}

LabelSet mask_to_set(unsigned mask) {
  LabelSet s;
  for (unsigned j = 0; mask >> j; ++j)
    if ((mask >> j) & 1U) s.push_back(j);
  return s;
}

void record_violation(TheoremReport& r, const std::string& what) {
  if (r.violations++ == 0) r.counterexample = what;
}

}  // namespace

SyntheticRanking gen_perfect_ranking(std::uint64_t seed, std::size_t n_instances, std::size_t n_labels,
                                     double label_density) {
  require(label_density > 0 && label_density < 1, "label_density must lie in (0, 1)");
  Rng rng(seed);
  SyntheticRanking r;
  r.n_instances = n_instances;
  r.n_labels = n_labels;
  r.truth.resize(n_instances);
  r.decisions = DecisionMatrix(n_instances, n_labels);
  for (std::size_t i = 0; i < n_instances; ++i) {
    r.truth[i] = random_subset(rng, n_labels, label_density);
    for (std::size_t j = 0; j < n_labels; ++j) {
      const bool is_true = std::binary_search(r.truth[i].begin(), r.truth[i].end(), static_cast<LabelId>(j));
      r.decisions(i, j) = is_true ? 0.5 + 0.5 * rng.uniform() : 0.5 * rng.uniform();
    }
  }
  r.perfect = true;
  return r;
}

bool is_perfectly_ranked(const SyntheticRanking& r) {
  for (std::size_t i = 0; i < r.n_instances; ++i) {
    double min_true = std::numeric_limits<double>::infinity();
    double max_false = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r.n_labels; ++j) {
      const bool is_true = std::binary_search(r.truth[i].begin(), r.truth[i].end(), static_cast<LabelId>(j));
      if (is_true)
        min_true = std::min(min_true, r.decisions(i, j));
      else
        max_false = std::max(max_false, r.decisions(i, j));
    }
    if (!(min_true > max_false)) return false;
  }
  return true;
}

TheoremReport check_theorem1(std::uint64_t seed, std::size_t trials) {
  require(trials >= 1, "trials must be at least 1");
  TheoremReport r;
  r.name = "micro_f1_upper_bound";
  r.seed = seed;
  r.trials = trials;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    const std::size_t n = 1 + rng.below(20);
    const std::size_t L = 1 + rng.below(10);
    const double density = rng.uniform(0.05, 0.95);
    LabelSets truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = random_subset(rng, L, density);
      pred[i] = random_subset(rng, L, density);
    }
    // Arbitrary prediction: value <= bound.
    const double micro = micro_of(truth, pred, L);
    const double bound = micro_upper_bound(set_sizes(truth), set_sizes(pred));
    const double slack = bound - micro;
    ++r.checks;
    r.min_slack = std::min(r.min_slack, slack);
    if (std::abs(slack) <= kTol) ++r.equality_cases;
    if (slack < -kTol || bound > 1.0 + kTol)
      record_violation(r, "trial " + std::to_string(trial) + ": truth=" + describe_sets(truth) +
                              " pred=" + describe_sets(pred) + " micro=" + text::format_double(micro) +
                              " bound=" + text::format_double(bound));

    // Prediction equal to truth attains the maximum 1 (when anything is true).
    std::size_t total_true = 0;
    for (const auto& t : truth) total_true += t.size();
    if (total_true > 0) {
      ++r.checks;
      const double m = micro_of(truth, truth, L);
      const double b = micro_upper_bound(set_sizes(truth), set_sizes(truth));
      r.max_abs_error = std::max({r.max_abs_error, std::abs(m - 1.0), std::abs(b - 1.0)});
      if (std::abs(m - 1.0) > kTol || std::abs(b - 1.0) > kTol)
        record_violation(r, "trial " + std::to_string(trial) + ": prediction == truth but micro=" +
                                text::format_double(m) + " bound=" + text::format_double(b));
    }

    // Top-K_i on a perfect ranking scores 1.
    const auto ranking = gen_perfect_ranking(derive_seed(seed, trials + trial), n, L, density);
    std::size_t ranking_true = 0;
    for (const auto& t : ranking.truth) ranking_true += t.size();
    if (ranking_true > 0) {
      ++r.checks;
      LabelSets top_k(n);
      for (std::size_t i = 0; i < n; ++i) top_k[i] = top_k_labels(ranking.decisions.row(i), ranking.truth[i].size());
      const double m = micro_of(ranking.truth, top_k, L);
      r.max_abs_error = std::max(r.max_abs_error, std::abs(m - 1.0));
      if (std::abs(m - 1.0) > kTol)
        record_violation(r, "trial " + std::to_string(trial) + ": K_hat = K on a perfect ranking gave micro=" +
                                text::format_double(m));
    }
  }
  return r;
}

TheoremReport check_theorem2(std::uint64_t seed, std::size_t trials) {
  require(trials >= 1, "trials must be at least 1");
  TheoremReport r;
  r.name = "perfect_ranking_attains_bound";
  r.seed = seed;
  r.trials = trials;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    const std::size_t n = 1 + rng.below(12);
    const std::size_t L = 1 + rng.below(8);
    const double density = rng.uniform(0.1, 0.9);
    const auto ranking = gen_perfect_ranking(rng.next(), n, L, density);
    std::vector<std::size_t> k_hat(n);
    for (auto& k : k_hat) k = rng.below(L + 1);

    LabelSets pred(n);
    for (std::size_t i = 0; i < n; ++i) pred[i] = top_k_labels(ranking.decisions.row(i), k_hat[i]);
    const double micro = micro_of(ranking.truth, pred, L);
    const double expected = micro_upper_bound(set_sizes(ranking.truth), k_hat);
    ++r.checks;
    const double err = std::abs(micro - expected);
    r.max_abs_error = std::max(r.max_abs_error, err);
    r.min_slack = std::min(r.min_slack, expected - micro);
    if (err <= kTol) ++r.equality_cases;
    if (err > kTol)
      record_violation(r, "trial " + std::to_string(trial) + ": truth=" + describe_sets(ranking.truth) +
                              " pred=" + describe_sets(pred) + " micro=" + text::format_double(micro) +
                              " expected=" + text::format_double(expected));

    // K_hat = K gives the best possible value 1.
    std::size_t total_true = 0;
    for (const auto& t : ranking.truth) total_true += t.size();
    if (total_true > 0) {
      LabelSets exact(n);
      for (std::size_t i = 0; i < n; ++i) exact[i] = top_k_labels(ranking.decisions.row(i), ranking.truth[i].size());
      const double m = micro_of(ranking.truth, exact, L);
      ++r.checks;
      r.max_abs_error = std::max(r.max_abs_error, std::abs(m - 1.0));
      if (std::abs(m - 1.0) > kTol)
        record_violation(r, "trial " + std::to_string(trial) + ": K_hat = K gave micro=" + text::format_double(m));
    }

    // Optimality: replacing any single row by any other subset of the same
    // size never scores higher. Micro-F1 with fixed sizes is monotone in the
    // total TP, which is a sum over rows, so row-wise replacement covers
    // every joint alternative.
    if (L <= kBruteForceMaxLabels) {
      for (std::size_t i = 0; i < n; ++i) {
        ++r.brute_force_instances;
        LabelSets alt = pred;
        for (unsigned mask = 0; mask < (1U << L); ++mask) {
          if (static_cast<std::size_t>(std::popcount(mask)) != k_hat[i]) continue;
          alt[i] = mask_to_set(mask);
          ++r.brute_force_subsets;
          ++r.checks;
          const double m = micro_of(ranking.truth, alt, L);
          if (m > micro + kTol)
            record_violation(r, "trial " + std::to_string(trial) + " row " + std::to_string(i) +
                                    ": alternative " + describe_sets({alt[i]}) + " scores " +
                                    text::format_double(m) + " > top-K " + text::format_double(micro));
        }
      }
    }
  }
  return r;
}

TheoremReport check_theorem3(std::uint64_t seed, std::size_t trials) {
  require(trials >= 1, "trials must be at least 1");
  TheoremReport r;
  r.name = "accuracy_equals_micro_f1";
  r.seed = seed;
  r.trials = trials;
  r.min_slack = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    const std::size_t n = 1 + rng.below(50);
    const std::size_t L = 1 + rng.below(10);
    LabelSets truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = {static_cast<LabelId>(rng.below(L))};
      // Bias towards agreement so all accuracy levels are exercised.
      pred[i] = rng.uniform() < 0.5 ? truth[i] : LabelSet{static_cast<LabelId>(rng.below(L))};
    }
    const double acc = multiclass_accuracy(truth, pred);
    const double micro = micro_of(truth, pred, L);
    ++r.checks;
    const double err = std::abs(acc - micro);
    r.max_abs_error = std::max(r.max_abs_error, err);
    if (acc == micro) ++r.equality_cases;
    if (acc != micro)
      record_violation(r, "trial " + std::to_string(trial) + ": accuracy=" + text::format_double(acc) +
                              " micro=" + text::format_double(micro));
  }
  return r;
}

OverestimationReport overestimation_demo(std::uint64_t seed, const std::vector<double>& noise_levels) {
  constexpr std::size_t kInstances = 500;
  constexpr std::size_t kLabels = 6;
  constexpr double kDensity = 0.3;
  constexpr double kBoundary = 0.75;

  OverestimationReport report;
  report.seed = seed;
  report.n_instances = kInstances;
  report.n_labels = kLabels;
  report.sign_boundary = kBoundary;

  // Shifts scores by -boundary, then swaps one true/false score pair per row
  // with probability p.
  const auto draw = [&](std::uint64_t s, double p) {
    auto r = gen_perfect_ranking(s, kInstances, kLabels, kDensity);
    Rng rng(derive_seed(s, 1));
    for (std::size_t i = 0; i < kInstances; ++i) {
      for (std::size_t j = 0; j < kLabels; ++j) r.decisions(i, j) -= kBoundary;
      const auto& t = r.truth[i];
      if (t.empty() || t.size() == kLabels) continue;
      if (rng.uniform() >= p) continue;
      const LabelId a = t[rng.below(t.size())];
      LabelSet falses;
      for (std::size_t j = 0; j < kLabels; ++j)
        if (!std::binary_search(t.begin(), t.end(), static_cast<LabelId>(j))) falses.push_back(static_cast<LabelId>(j));
      const LabelId b = falses[rng.below(falses.size())];
      std::swap(r.decisions(i, a), r.decisions(i, b));
      r.perfect = false;
    }
    return r;
  };

  for (std::size_t level = 0; level < noise_levels.size(); ++level) {
    const double p = noise_levels[level];
    const auto test = draw(derive_seed(seed, 2 * level), p);
    const auto calib = draw(derive_seed(seed, 2 * level + 1), p);

    OverestimationRow row;
    row.noise = p;
    const auto micro = [&](const PredictionSet& ps) { return micro_of(test.truth, ps.predicted, kLabels); };
    row.unrealistic = micro(predict_unrealistic(test.decisions, set_sizes(test.truth)));
    row.basic = micro(predict_basic(test.decisions));
    row.no_empty = micro(predict_no_empty(test.decisions));

    DecisionMatrix shifted = test.decisions;
    for (std::size_t j = 0; j < kLabels; ++j) {
      std::vector<ScoredValue> scored;
      for (std::size_t i = 0; i < kInstances; ++i)
        scored.push_back({calib.decisions(i, j),
                          std::binary_search(calib.truth[i].begin(), calib.truth[i].end(), static_cast<LabelId>(j))});
      const double delta = sweep_threshold(scored).delta;
      for (std::size_t i = 0; i < kInstances; ++i) shifted(i, j) += delta;
    }
    row.thresholded = micro(predict_basic(shifted));
    row.gap = row.unrealistic - row.basic;
    for (std::size_t i = 0; i < kInstances && !row.true_label_below_boundary; ++i)
      for (LabelId l : test.truth[i])
        if (test.decisions(i, l) < 0) row.true_label_below_boundary = true;
    report.rows.push_back(row);
  }
  return report;
}

bool VerifyReport::passed() const {
  return std::all_of(theorems.begin(), theorems.end(), [](const TheoremReport& t) { return t.passed(); });
}

VerifyReport verify_all(std::uint64_t seed, std::size_t trials) {
  VerifyReport v;
  v.theorems.push_back(check_theorem1(derive_seed(seed, 101), trials));
  v.theorems.push_back(check_theorem2(derive_seed(seed, 102), trials));
  v.theorems.push_back(check_theorem3(derive_seed(seed, 103), trials));
  v.demo = overestimation_demo(derive_seed(seed, 104));
  return v;
}

std::string to_json(const VerifyReport& v) {
  nlohmann::ordered_json j;
  j["passed"] = v.passed();
  auto& th = j["theorems"] = nlohmann::ordered_json::array();
  for (const auto& t : v.theorems) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["seed"] = t.seed;
    e["trials"] = t.trials;
    e["checks"] = t.checks;
    e["violations"] = t.violations;
    e["equality_cases"] = t.equality_cases;
    e["min_slack"] = t.min_slack;
    e["max_abs_error"] = t.max_abs_error;
    e["brute_force_instances"] = t.brute_force_instances;
    e["brute_force_subsets"] = t.brute_force_subsets;
    e["brute_force_max_labels"] = kBruteForceMaxLabels;
    e["counterexample"] = t.counterexample;
    e["passed"] = t.passed();
    th.push_back(std::move(e));
  }
  auto& demo = j["overestimation"];
  demo["seed"] = v.demo.seed;
  demo["n_instances"] = v.demo.n_instances;
  demo["n_labels"] = v.demo.n_labels;
  demo["sign_boundary"] = v.demo.sign_boundary;
  auto& rows = demo["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : v.demo.rows) {
    rows.push_back({{"noise", r.noise},
                    {"unrealistic", r.unrealistic},
                    {"basic", r.basic},
                    {"no_empty", r.no_empty},
                    {"thresholded", r.thresholded},
                    {"gap", r.gap},
                    {"true_label_below_boundary", r.true_label_below_boundary}});
  }
  return j.dump(2) + "\n";
}

std::string to_text(const VerifyReport& v) {
  std::string out;
  char buf[256];
  for (const auto& t : v.theorems) {
    std::snprintf(buf, sizeof(buf), "%-32s %s  trials=%zu checks=%zu violations=%zu equalities=%zu min_slack=%.3g max_err=%.3g",
                  t.name.c_str(), t.passed() ? "PASS" : "FAIL", t.trials, t.checks, t.violations, t.equality_cases,
                  t.min_slack, t.max_abs_error);
    out += buf;
    if (t.brute_force_instances > 0) {
      std::snprintf(buf, sizeof(buf), " brute_force_rows=%zu subsets=%zu (labels<=%zu)", t.brute_force_instances,
                    t.brute_force_subsets, kBruteForceMaxLabels);
      out += buf;
    }
    out += '\n';
    if (!t.passed()) out += "  counterexample: " + t.counterexample + "\n";
  }
  std::snprintf(buf, sizeof(buf), "\nMicro-F1 on synthetic rankings (%zu instances, %zu labels, sign boundary %.2f)\n",
                v.demo.n_instances, v.demo.n_labels, v.demo.sign_boundary);
  out += buf;
  out += "noise  unrealistic  basic   no-empty  thresholded  gap\n";
  for (const auto& r : v.demo.rows) {
    std::snprintf(buf, sizeof(buf), "%-5.2f  %-11.4f  %-6.4f  %-8.4f  %-11.4f  %.4f\n", r.noise, r.unrealistic, r.basic,
                  r.no_empty, r.thresholded, r.gap);
    out += buf;
  }
  return out;
}

}  // namespace ovrkit::theory
