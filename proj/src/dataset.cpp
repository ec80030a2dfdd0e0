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

#include "ovrkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ovrkit/error.hpp"
#include "ovrkit/log.hpp"
#include "ovrkit/rng.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {

SparseDataset::SparseDataset(std::size_t n_features, std::size_t n_labels,
                             std::vector<SparseRow> rows, LabelSets labels)
    : n_features_(n_features), n_labels_(n_labels) {
  require(rows.size() == labels.size(), "feature rows and label sets differ in count");
  row_offsets_.reserve(rows.size() + 1);
  label_offsets_.reserve(rows.size() + 1);
  row_offsets_.push_back(0);
  label_offsets_.push_back(0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end(), [](const Feature& a, const Feature& b) { return a.index < b.index; });
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k].index >= n_features)
        fail(ErrorCode::kDimension, "instance " + std::to_string(i) + ": feature index " +
                                        std::to_string(r[k].index) + " >= n_features " +
                                        std::to_string(n_features));
      if (k > 0 && r[k].index == r[k - 1].index)
        fail(ErrorCode::kInvalidArgument, "instance " + std::to_string(i) +
                                              ": duplicate feature index " + std::to_string(r[k].index));
    }
    features_.insert(features_.end(), r.begin(), r.end());
    row_offsets_.push_back(features_.size());

    auto& l = labels[i];
    std::sort(l.begin(), l.end());
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (l[k] >= n_labels)
        fail(ErrorCode::kDimension, "instance " + std::to_string(i) + ": label " +
                                        std::to_string(l[k]) + " >= n_labels " + std::to_string(n_labels));
      if (k > 0 && l[k] == l[k - 1])
        fail(ErrorCode::kInvalidArgument,
             "instance " + std::to_string(i) + ": duplicate label " + std::to_string(l[k]));
    }
    if (l.empty()) ++empty_label_count_;
    labels_.insert(labels_.end(), l.begin(), l.end());
    label_offsets_.push_back(labels_.size());
  }
}

bool SparseDataset::has_label(std::size_t i, LabelId label) const {
  const auto ls = labels(i);
  return std::binary_search(ls.begin(), ls.end(), label);
}

std::size_t SparseDataset::label_frequency(LabelId label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

LabelSets SparseDataset::label_sets() const {
  LabelSets out(n_instances());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto ls = labels(i);
    out[i].assign(ls.begin(), ls.end());
  }
  return out;
}

SparseDataset SparseDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SparseRow> rows;
  LabelSets labels;
  rows.reserve(indices.size());
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < n_instances(), "subset index out of range");
    const auto r = row(i);
    rows.emplace_back(r.begin(), r.end());
    const auto l = this->labels(i);
    labels.emplace_back(l.begin(), l.end());
  }
  return SparseDataset(n_features_, n_labels_, std::move(rows), std::move(labels));
}

SparseDataset SparseDataset::l2_normalized() const {
  SparseDataset out = *this;
  for (std::size_t i = 0; i < n_instances(); ++i) {
    double sq = 0;
    for (const auto& f : row(i)) sq += f.value * f.value;
    if (sq <= 0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) out.features_[k].value *= inv;
  }
  return out;
}

namespace {

std::size_t checked_index(std::string_view token, std::size_t line, const char* what, bool one_based) {
  const auto v = text::parse_int(token);
  if (!v) throw ParseError(line, std::string("malformed ") + what + " '" + std::string(token) + "'");
  if (*v < 0) throw ParseError(line, std::string("negative ") + what + " " + std::to_string(*v));
  if (one_based) {
    if (*v == 0) throw ParseError(line, std::string("zero ") + what + " in 1-based file");
    return static_cast<std::size_t>(*v - 1);
  }
  if (*v > 0xFFFFFFFFLL) throw ParseError(line, std::string(what) + " too large");
  return static_cast<std::size_t>(*v);
}

// Applies `#@ key=value ...` header fields.
void read_header(std::string_view body, std::size_t line, ParseOptions& header) {
  for (auto tok : text::split_ws(body)) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "malformed header field '" + std::string(tok) + "'");
    const auto key = tok.substr(0, eq);
    const auto val = text::parse_int(tok.substr(eq + 1));
    if (!val || *val < 0) throw ParseError(line, "malformed header value in '" + std::string(tok) + "'");
    if (key == "n_features") {
      header.n_features = static_cast<std::size_t>(*val);
    } else if (key == "n_labels") {
      header.n_labels = static_cast<std::size_t>(*val);
    } else {
      throw ParseError(line, "unknown header key '" + std::string(key) + "'");
    }
  }
}

std::size_t resolve_dim(std::size_t observed, std::optional<std::size_t> header,
                        std::optional<std::size_t> option, const char* what) {
  const auto chosen = option ? option : header;
  if (!chosen) return observed;
  if (*chosen < observed)
    fail(ErrorCode::kDimension, std::string("declared ") + what + " " + std::to_string(*chosen) +
                                    " is smaller than observed " + std::to_string(observed));
  return *chosen;
}

SparseDataset finish(std::size_t max_feature, std::size_t max_label, std::vector<SparseRow> rows,
                     LabelSets labels, const ParseOptions& header, const ParseOptions& options) {
  if (rows.empty()) fail(ErrorCode::kParse, "dataset contains no instances");
  const std::size_t n_features = resolve_dim(max_feature, header.n_features, options.n_features, "n_features");
  const std::size_t n_labels = resolve_dim(max_label, header.n_labels, options.n_labels, "n_labels");
  SparseDataset data(n_features, n_labels, std::move(rows), std::move(labels));
  if (data.empty_label_count() > 0)
    log_warning(std::to_string(data.empty_label_count()) + " instance(s) have no labels");
  return options.l2_normalize ? data.l2_normalized() : data;
}

}  // namespace

LabelSet parse_label_list(std::string_view field, std::size_t line, bool one_based) {
  LabelSet out;
  field = text::trim(field);
  if (field.empty()) return out;
  for (auto tok : text::split(field, ',')) {
    tok = text::trim(tok);
    if (tok.empty()) throw ParseError(line, "empty label in list");
    out.push_back(static_cast<LabelId>(checked_index(tok, line, "label", one_based)));
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ParseError(line, "duplicate label");
  return out;
}

LabelSets parse_label_file(std::string_view contents, bool one_based) {
  LabelSets out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    ++line_no;
    out.push_back(parse_label_list(contents.substr(start, end - start), line_no, one_based));
    start = end + 1;
  }
  return out;
}

SparseDataset parse_svmlight(std::string_view contents, const ParseOptions& options) {
  std::vector<SparseRow> rows;
  LabelSets labels;
  ParseOptions header;
  std::size_t max_feature = 0, max_label = 0;  // max index + 1
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    ++line_no;
    const auto line = text::trim(contents.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.size() >= 2 && line[1] == '@') read_header(line.substr(2), line_no, header);
      continue;
    }
    auto tokens = text::split_ws(line);
    std::size_t first = 0;
    LabelSet ls;
    if (tokens[0].find(':') == std::string_view::npos) {
      ls = parse_label_list(tokens[0], line_no, options.one_based_labels);
      first = 1;
    }
    SparseRow row;
    row.reserve(tokens.size() - first);
    for (std::size_t k = first; k < tokens.size(); ++k) {
      const auto colon = tokens[k].find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected idx:val, got '" + std::string(tokens[k]) + "'");
      const auto idx = checked_index(tokens[k].substr(0, colon), line_no, "feature index", false);
      const auto val = text::parse_double(tokens[k].substr(colon + 1));
      if (!val) throw ParseError(line_no, "malformed feature value '" + std::string(tokens[k]) + "'");
      row.push_back({static_cast<FeatureId>(idx), *val});
    }
    std::sort(row.begin(), row.end(), [](const Feature& a, const Feature& b) { return a.index < b.index; });
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k].index == row[k - 1].index) throw ParseError(line_no, "duplicate feature index");
    if (!row.empty()) max_feature = std::max<std::size_t>(max_feature, row.back().index + 1);
    if (!ls.empty()) max_label = std::max<std::size_t>(max_label, ls.back() + 1);
    rows.push_back(std::move(row));
    labels.push_back(std::move(ls));
  }
  return finish(max_feature, max_label, std::move(rows), std::move(labels), header, options);
}

SparseDataset parse_dense_pair(std::string_view features, std::string_view labels,
                               const ParseOptions& options) {
  std::vector<SparseRow> rows;
  std::optional<std::size_t> width;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < features.size()) {
    std::size_t end = features.find('\n', start);
    if (end == std::string_view::npos) end = features.size();
    ++line_no;
    const auto line = text::trim(features.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = text::split_ws(line);
    if (width && tokens.size() != *width)
      throw ParseError(line_no, "expected " + std::to_string(*width) + " values, got " +
                                    std::to_string(tokens.size()));
    width = tokens.size();
    SparseRow row;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      const auto v = text::parse_double(tokens[k]);
      if (!v) throw ParseError(line_no, "malformed value '" + std::string(tokens[k]) + "'");
      if (*v != 0.0) row.push_back({static_cast<FeatureId>(k), *v});
    }
    rows.push_back(std::move(row));
  }
  auto label_sets = parse_label_file(labels, options.one_based_labels);
  // A trailing newline leaves no extra entry; tolerate extra empty lines at the end only.
  while (label_sets.size() > rows.size() && label_sets.back().empty()) label_sets.pop_back();
  if (label_sets.size() != rows.size())
    fail(ErrorCode::kParse, "label file has " + std::to_string(label_sets.size()) +
                                " rows but feature file has " + std::to_string(rows.size()));
  std::size_t max_label = 0;
  for (const auto& ls : label_sets)
    if (!ls.empty()) max_label = std::max<std::size_t>(max_label, ls.back() + 1);
  return finish(width.value_or(0), max_label, std::move(rows), std::move(label_sets), ParseOptions{},
                options);
}

SparseDataset load_svmlight(const std::string& path, const ParseOptions& options) {
  return parse_svmlight(text::read_file(path), options);
}

SparseDataset load_dense_pair(const std::string& feature_path, const std::string& label_path,
                              const ParseOptions& options) {
  return parse_dense_pair(text::read_file(feature_path), text::read_file(label_path), options);
}

std::string to_svmlight(const SparseDataset& data) {
  std::string out = "#@ n_features=" + std::to_string(data.n_features()) +
                    " n_labels=" + std::to_string(data.n_labels()) + "\n";
  for (std::size_t i = 0; i < data.n_instances(); ++i) {
    std::string line;
    const auto ls = data.labels(i);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      if (k) line += ',';
      line += std::to_string(ls[k]);
    }
    for (const auto& f : data.row(i)) {
      if (!line.empty()) line += ' ';
      line += std::to_string(f.index) + ':' + text::format_double(f.value);
    }
    // A fully empty instance would be a blank line, which the parser skips.
    if (line.empty()) fail(ErrorCode::kInvalidArgument, "instance " + std::to_string(i) +
                                                            " has neither labels nor features");
    out += line;
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splits and folds

SplitPlan make_split(std::size_t n_instances, std::uint64_t seed, double train_fraction) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
  require(n_instances >= 2, "need at least 2 instances to split");
  std::vector<std::size_t> perm(n_instances);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(perm));
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_instances)));
  SplitPlan plan;
  plan.seed = seed;
  plan.train_fraction = train_fraction;
  plan.n_instances = n_instances;
  plan.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  plan.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

FoldPlan make_folds(std::size_t train_size, std::size_t k, std::uint64_t seed) {
  require(k >= 2, "fold count must be at least 2");
  require(k <= train_size, "fold count " + std::to_string(k) + " exceeds training size " +
                               std::to_string(train_size));
  std::vector<std::size_t> perm(train_size);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(perm));
  FoldPlan plan;
  plan.seed = seed;
  plan.k = k;
  plan.assignment.resize(train_size);
  for (std::size_t p = 0; p < train_size; ++p) plan.assignment[perm[p]] = p % k;
  return plan;
}

std::vector<std::size_t> FoldPlan::validation(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::training(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] != f) out.push_back(i);
  return out;
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<std::size_t> parse_index_line(std::string_view line, std::string_view key, std::size_t line_no) {
  auto tokens = text::split_ws(line);
  if (tokens.empty() || tokens[0] != key) throw ParseError(line_no, "expected '" + std::string(key) + "'");
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k < tokens.size(); ++k) out.push_back(checked_index(tokens[k], line_no, "index", false));
  return out;
}

std::vector<std::string_view> plan_lines(std::string_view text_in) {
  std::vector<std::string_view> lines;
  for (auto l : text::split(text_in, '\n'))
    if (!text::trim(l).empty()) lines.push_back(text::trim(l));
  return lines;
}

// Reads "key=value" fields from a header line.
std::string_view field(std::string_view line, std::string_view key, std::size_t line_no) {
  for (auto tok : text::split_ws(line)) {
    if (tok.size() > key.size() && tok.substr(0, key.size()) == key && tok[key.size()] == '=')
      return tok.substr(key.size() + 1);
  }
  throw ParseError(line_no, "missing field '" + std::string(key) + "'");
}

}  // namespace

std::string to_text(const SplitPlan& plan) {
  return "split seed=" + std::to_string(plan.seed) + " train_fraction=" +
         text::format_double(plan.train_fraction) + " n=" + std::to_string(plan.n_instances) + "\n" +
         "train " + join(plan.train_indices) + "\n" + "test " + join(plan.test_indices) + "\n";
}

std::string to_text(const FoldPlan& plan) {
  return "folds seed=" + std::to_string(plan.seed) + " k=" + std::to_string(plan.k) +
         " n=" + std::to_string(plan.size()) + "\n" + "assignment " + join(plan.assignment) + "\n";
}

SplitPlan parse_split_plan(std::string_view text_in) {
  const auto lines = plan_lines(text_in);
  if (lines.size() != 3 || !lines[0].starts_with("split")) fail(ErrorCode::kParse, "not a split plan");
  SplitPlan plan;
  const auto seed = text::parse_int(field(lines[0], "seed", 1));
  const auto frac = text::parse_double(field(lines[0], "train_fraction", 1));
  const auto n = text::parse_int(field(lines[0], "n", 1));
  if (!seed || !frac || !n || *n < 0) throw ParseError(1, "malformed split header");
  plan.seed = static_cast<std::uint64_t>(*seed);
  plan.train_fraction = *frac;
  plan.n_instances = static_cast<std::size_t>(*n);
  plan.train_indices = parse_index_line(lines[1], "train", 2);
  plan.test_indices = parse_index_line(lines[2], "test", 3);
  return plan;
}

FoldPlan parse_fold_plan(std::string_view text_in) {
  const auto lines = plan_lines(text_in);
  if (lines.size() != 2 || !lines[0].starts_with("folds")) fail(ErrorCode::kParse, "not a fold plan");
  FoldPlan plan;
  const auto seed = text::parse_int(field(lines[0], "seed", 1));
  const auto k = text::parse_int(field(lines[0], "k", 1));
  if (!seed || !k || *k < 0) throw ParseError(1, "malformed folds header");
  plan.seed = static_cast<std::uint64_t>(*seed);
  plan.k = static_cast<std::size_t>(*k);
  plan.assignment = parse_index_line(lines[1], "assignment", 2);
  return plan;
}

std::string digest(const SplitPlan& plan) { return text::fnv1a_hex(to_text(plan)); }
std::string digest(const FoldPlan& plan) { return text::fnv1a_hex(to_text(plan)); }

}  // namespace ovrkit
