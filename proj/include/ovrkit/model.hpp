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

#ifndef OVRKIT_MODEL_HPP_
#define OVRKIT_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovrkit/solver.hpp"

namespace ovrkit {

enum class TrainStrategy { kBasic, kBasicC, kThresholding, kCostSensitive, kCostSensitiveSimple };

std::string_view to_string(TrainStrategy s);
TrainStrategy parse_train_strategy(std::string_view name);

struct Provenance {
  std::uint64_t seed = 0;
  std::string fold_digest = "-";  // "-" when no folds were used
  std::string grid = "-";

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One binary model per label, in label order.
struct OvRModel {
  std::size_t n_features = 0;
  std::vector<BinaryModel> models;
  TrainStrategy strategy = TrainStrategy::kBasic;
  Provenance provenance;

  std::size_t n_labels() const { return models.size(); }
};

/// Versioned text format. Header lines:
///   ovrkit-model 1
///   n_features <n>
///   n_labels <L>
///   strategy <name>
///   seed <s>
///   folds <digest|->
///   grid <free text|->
/// then one record per label:
///   <label> <C> <t> <delta> <always_negative 0|1> <bias> [idx:val ...]
/// Reals use the shortest round-trip decimal form, so write/read is exact.
std::string to_text(const OvRModel& model);
OvRModel parse_model(std::string_view text);
void save_model(const OvRModel& model, const std::string& path);
OvRModel load_model(const std::string& path);

/// Per-label audit record produced by the C-selection and calibration
/// trainers.
struct LabelCalibration {
  LabelId label = 0;
  double C = 1;
  double t = 1;
  std::optional<double> fbr;
  double delta = 0;
  double cv_f1 = 0;
  std::vector<double> fold_deltas;
  std::vector<double> fold_best_f1;
};

struct CalibrationReport {
  TrainStrategy strategy = TrainStrategy::kBasic;
  std::vector<LabelCalibration> labels;
};

/// Line-oriented report: a `# strategy=<name>` line, then one line per label
/// of space-separated key=value fields.
std::string to_text(const CalibrationReport& report);

}  // namespace ovrkit

#endif  // OVRKIT_MODEL_HPP_
