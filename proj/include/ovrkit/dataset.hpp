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

#ifndef OVRKIT_DATASET_HPP_
#define OVRKIT_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ovrkit {

using LabelId = std::uint32_t;
using FeatureId = std::uint32_t;

struct Feature {
  FeatureId index;
  double value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

using SparseRow = std::vector<Feature>;
using LabelSet = std::vector<LabelId>;
using LabelSets = std::vector<LabelSet>;

/// Immutable row-sparse feature matrix with one label set per instance.
///
/// Rows are sorted by feature index with no duplicates; label sets are sorted
/// with no duplicates. Instances with empty label sets are kept (they are
/// negatives for every label) and counted in empty_label_count().
class SparseDataset {
 public:
  SparseDataset() = default;

  /// Validates and takes ownership. Rows and label sets are sorted here;
  /// duplicates or out-of-range indices throw.
  SparseDataset(std::size_t n_features, std::size_t n_labels, std::vector<SparseRow> rows,
                LabelSets labels);

  std::size_t n_instances() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_labels() const { return n_labels_; }
  std::size_t empty_label_count() const { return empty_label_count_; }

  std::span<const Feature> row(std::size_t i) const {
    return {features_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const LabelId> labels(std::size_t i) const {
    return {labels_.data() + label_offsets_[i], label_offsets_[i + 1] - label_offsets_[i]};
  }
  bool has_label(std::size_t i, LabelId label) const;

  /// Number of instances carrying `label`.
  std::size_t label_frequency(LabelId label) const;

  LabelSets label_sets() const;

  /// Instances at `indices` (in that order), keeping n_features/n_labels.
  SparseDataset subset(std::span<const std::size_t> indices) const;

  /// Copy with each row scaled to unit L2 norm (all-zero rows untouched).
  SparseDataset l2_normalized() const;

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::size_t n_features_ = 0;
  std::size_t n_labels_ = 0;
  std::size_t empty_label_count_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<Feature> features_;
  std::vector<std::size_t> label_offsets_;
  std::vector<LabelId> labels_;
};

enum class DataFormat { kSvmlightMultilabel, kDensePair };

struct ParseOptions {
  bool one_based_labels = false;
  bool l2_normalize = false;
  /// Overrides for the dimensions inferred from max index + 1. A header line
  /// `#@ n_features=N n_labels=L` in an svmlight file has the same effect;
  /// explicit options win over the header.
  std::optional<std::size_t> n_features;
  std::optional<std::size_t> n_labels;
};

/// `lbl[,lbl...] idx:val [idx:val...]` per line. `#` starts a comment line,
/// blank lines are skipped, and the label field may be absent.
SparseDataset parse_svmlight(std::string_view contents, const ParseOptions& options = {});

/// Dense whitespace-separated feature rows plus a row-aligned label file
/// holding one comma-separated label list per line (empty line = no labels).
SparseDataset parse_dense_pair(std::string_view features, std::string_view labels,
                               const ParseOptions& options = {});

SparseDataset load_svmlight(const std::string& path, const ParseOptions& options = {});
SparseDataset load_dense_pair(const std::string& feature_path, const std::string& label_path,
                              const ParseOptions& options = {});

/// Emits the `#@` dimension header followed by one svmlight line per instance.
/// Parsing the output reproduces the dataset exactly.
std::string to_svmlight(const SparseDataset& data);

/// Parses one comma-separated label list (no whitespace semantics beyond
/// trimming). Used by the label-file and prediction-dump readers.
LabelSet parse_label_list(std::string_view field, std::size_t line, bool one_based);

/// Reads a label file: one comma-separated list per line, empty lines allowed.
LabelSets parse_label_file(std::string_view contents, bool one_based = false);

struct SplitPlan {
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::size_t n_instances = 0;
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // fold id per training position

  std::size_t size() const { return assignment.size(); }
  /// Positions in fold `f` (ascending) and the complement.
  std::vector<std::size_t> validation(std::size_t f) const;
  std::vector<std::size_t> training(std::size_t f) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Uniform random split: a seeded Fisher-Yates permutation whose first
/// round(train_fraction * n) entries become the training set.
SplitPlan make_split(std::size_t n_instances, std::uint64_t seed, double train_fraction);

/// Balanced assignment: position p of a seeded permutation goes to fold p % k.
FoldPlan make_folds(std::size_t train_size, std::size_t k, std::uint64_t seed);

std::string to_text(const SplitPlan& plan);
std::string to_text(const FoldPlan& plan);
SplitPlan parse_split_plan(std::string_view text);
FoldPlan parse_fold_plan(std::string_view text);

/// FNV-1a digest of the plan's text form.
std::string digest(const SplitPlan& plan);
std::string digest(const FoldPlan& plan);

}  // namespace ovrkit

#endif  // OVRKIT_DATASET_HPP_
