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

#ifndef OVRKIT_EXPERIMENT_HPP_
#define OVRKIT_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ovrkit/calibration.hpp"
#include "ovrkit/dataset.hpp"
#include "ovrkit/metrics.hpp"
#include "ovrkit/predictor.hpp"
#include "ovrkit/trainer.hpp"

namespace ovrkit {

/// Training + prediction pairings compared by the experiment runner.
enum class Method {
  kUnrealistic,
  kBasic,
  kBasicC,
  kNoEmpty,
  kThresholding,
  kCostSensitive,
  kCostSensitiveNoEmpty,
  kCostSensitiveSimple,
};

std::string_view to_string(Method m);
/// Accepts the long names ("one-vs-rest-basic") and the short ones ("basic").
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

/// Training strategy and prediction rule behind a method.
TrainStrategy training_for(Method m);
PredictStrategy prediction_for(Method m);

struct Representation {
  std::string name;
  std::string features;  // path
};

/// Declarative experiment manifest. JSON keys (all optional except
/// representations, and labels for the dense format):
///   representations  [{"name": str, "features": path}, ...] or [path, ...]
///   labels           path (dense format)
///   format           "dense" | "svmlight"            (default "dense")
///   one_based_labels bool                            (false)
///   l2_normalize     bool                            (false)
///   methods          [name, ...]                     (all but unrealistic)
///   seeds            [int, ...]                      ([0,1,2,3,4])
///   train_fraction   real                            (0.8)
///   k_folds          int                             (5)
///   c_grid           [real, ...]                     (2^-10 .. 2^10)
///   basic_C          real                            (1)
///   threshold_C      real                            (1)
///   fbr              [real, ...]                     ([0,0.1,...,0.5])
///   inner_k          int                             (3)
///   tolerance        real                            (1e-4)
///   threads          int                             (0 = all cores)
///   parallel_seeds   bool                            (false)
///   allow_ground_truth bool                          (false)
///   output_dir       path                            ("" = no files)
struct ExperimentConfig {
  std::vector<Representation> representations;
  std::string labels;
  DataFormat format = DataFormat::kDensePair;
  ParseOptions parse;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  double train_fraction = 0.8;
  std::size_t k_folds = 5;
  std::vector<double> c_grid;  // empty = default grid
  double basic_C = 1.0;
  ThresholdingOptions thresholding;
  TrainOptions train;
  bool parallel_seeds = false;
  bool allow_ground_truth = false;
  std::string output_dir;

  /// Throws kGroundTruthGate when unrealistic is requested without
  /// allow_ground_truth, kInvalidArgument for other inconsistencies.
  void validate() const;
};

/// Parses a manifest; unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view json);

struct RunProvenance {
  std::string representation;
  std::uint64_t seed = 0;
  std::string split_digest;
  std::string fold_digest;
};

struct RunResult {
  std::string representation;
  Method method = Method::kBasic;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

struct ExperimentResult {
  std::vector<RunProvenance> provenance;
  std::vector<RunResult> runs;  // ordered by representation, seed, method
  std::string metrics_json;
  std::string table;
};

/// For every representation and seed: split with make_split(n, seed,
/// train_fraction) (identical across representations), draw CV folds with
/// derive_seed(seed, 1), train each needed strategy once, predict, and score.
/// When output_dir is set, writes metrics.json, table.txt and
/// splits/seed_<s>.txt there. Phase timings go to the log only, so
/// metrics_json is byte-identical across reruns.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Mean ± sample standard deviation per (method, representation), in two
/// blocks (Macro-F1, Micro-F1): methods as rows, representations as columns.
std::string format_table(const std::vector<RunResult>& runs, const std::vector<std::string>& representations,
                         const std::vector<Method>& methods);

}  // namespace ovrkit

#endif  // OVRKIT_EXPERIMENT_HPP_
