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

#include "ovrkit/model.hpp"

#include <array>
#include <utility>

#include "ovrkit/error.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {
namespace {

constexpr std::array<std::pair<TrainStrategy, std::string_view>, 5> kStrategyNames{{
    {TrainStrategy::kBasic, "basic"},
    {TrainStrategy::kBasicC, "basic-C"},
    {TrainStrategy::kThresholding, "thresholding"},
    {TrainStrategy::kCostSensitive, "cost-sensitive"},
    {TrainStrategy::kCostSensitiveSimple, "cost-sensitive-simple"},
}};

constexpr std::string_view kMagic = "ovrkit-model";
constexpr int kFormatVersion = 1;

std::string_view expect_key(std::string_view line, std::string_view key, std::size_t line_no) {
  if (line.size() < key.size() || line.substr(0, key.size()) != key ||
      (line.size() > key.size() && line[key.size()] != ' '))
    throw ParseError(line_no, "expected '" + std::string(key) + "'");
  return text::trim(line.substr(key.size()));
}

std::size_t parse_count(std::string_view s, std::size_t line_no) {
  const auto v = text::parse_int(s);
  if (!v || *v < 0) throw ParseError(line_no, "malformed count '" + std::string(s) + "'");
  return static_cast<std::size_t>(*v);
}

double parse_real(std::string_view s, std::size_t line_no) {
  const auto v = text::parse_double(s);
  if (!v) throw ParseError(line_no, "malformed real '" + std::string(s) + "'");
  return *v;
}

std::string join_reals(const std::vector<double>& v) {
  if (v.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += text::format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(TrainStrategy s) {
  for (const auto& [k, name] : kStrategyNames)
    if (k == s) return name;
  return "unknown";
}

TrainStrategy parse_train_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames)
    if (n == name) return k;
  fail(ErrorCode::kInvalidArgument, "unknown training strategy '" + std::string(name) + "'");
}

std::string to_text(const OvRModel& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
  out += "n_features " + std::to_string(model.n_features) + "\n";
  out += "n_labels " + std::to_string(model.n_labels()) + "\n";
  out += "strategy " + std::string(to_string(model.strategy)) + "\n";
  out += "seed " + std::to_string(model.provenance.seed) + "\n";
  out += "folds " + model.provenance.fold_digest + "\n";
  out += "grid " + model.provenance.grid + "\n";
  for (std::size_t j = 0; j < model.models.size(); ++j) {
    const auto& m = model.models[j];
    out += std::to_string(j) + ' ' + text::format_double(m.C) + ' ' + text::format_double(m.t) + ' ' +
           text::format_double(m.delta) + ' ' + (m.always_negative ? '1' : '0') + ' ' +
           text::format_double(m.bias);
    for (std::size_t i = 0; i < m.w.size(); ++i) {
      if (m.w[i] == 0.0) continue;
      out += ' ' + std::to_string(i) + ':' + text::format_double(m.w[i]);
    }
    out += '\n';
  }
  return out;
}

OvRModel parse_model(std::string_view contents) {
  std::vector<std::string_view> lines;
  for (auto l : text::split(contents, '\n')) lines.push_back(text::trim(l));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 7) fail(ErrorCode::kParse, "model file truncated");

  const auto magic = text::split_ws(lines[0]);
  if (magic.size() != 2 || magic[0] != kMagic) throw ParseError(1, "not an ovrkit model file");
  if (magic[1] != std::to_string(kFormatVersion))
    throw ParseError(1, "unsupported model format version " + std::string(magic[1]));

  OvRModel model;
  model.n_features = parse_count(expect_key(lines[1], "n_features", 2), 2);
  const std::size_t n_labels = parse_count(expect_key(lines[2], "n_labels", 3), 3);
  model.strategy = parse_train_strategy(expect_key(lines[3], "strategy", 4));
  model.provenance.seed = parse_count(expect_key(lines[4], "seed", 5), 5);
  model.provenance.fold_digest = std::string(expect_key(lines[5], "folds", 6));
  model.provenance.grid = std::string(expect_key(lines[6], "grid", 7));

  if (lines.size() != 7 + n_labels)
    fail(ErrorCode::kParse, "model declares " + std::to_string(n_labels) + " labels but has " +
                                std::to_string(lines.size() - 7) + " records");
  model.models.resize(n_labels);
  for (std::size_t j = 0; j < n_labels; ++j) {
    const std::size_t line_no = 8 + j;
    const auto tok = text::split_ws(lines[7 + j]);
    if (tok.size() < 6) throw ParseError(line_no, "label record needs at least 6 fields");
    if (parse_count(tok[0], line_no) != j) throw ParseError(line_no, "label records out of order");
    auto& m = model.models[j];
    m.C = parse_real(tok[1], line_no);
    m.t = parse_real(tok[2], line_no);
    m.delta = parse_real(tok[3], line_no);
    if (tok[4] != "0" && tok[4] != "1") throw ParseError(line_no, "always_negative flag must be 0 or 1");
    m.always_negative = tok[4] == "1";
    m.bias = parse_real(tok[5], line_no);
    m.w.assign(model.n_features, 0.0);
    for (std::size_t k = 6; k < tok.size(); ++k) {
      const auto colon = tok[k].find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected idx:val");
      const auto idx = parse_count(tok[k].substr(0, colon), line_no);
      if (idx >= model.n_features) throw ParseError(line_no, "weight index beyond n_features");
      m.w[idx] = parse_real(tok[k].substr(colon + 1), line_no);
    }
  }
  return model;
}

void save_model(const OvRModel& model, const std::string& path) { text::write_file(path, to_text(model)); }

OvRModel load_model(const std::string& path) { return parse_model(text::read_file(path)); }

std::string to_text(const CalibrationReport& report) {
  std::string out = "# strategy=" + std::string(to_string(report.strategy)) + "\n";
  for (const auto& l : report.labels) {
    out += "label=" + std::to_string(l.label) + " C=" + text::format_double(l.C) +
           " t=" + text::format_double(l.t) + " fbr=" + (l.fbr ? text::format_double(*l.fbr) : "-") +
           " delta=" + text::format_double(l.delta) + " cv_f1=" + text::format_double(l.cv_f1) +
           " fold_deltas=" + join_reals(l.fold_deltas) + " fold_best_f1=" + join_reals(l.fold_best_f1) + "\n";
  }
  return out;
}

}  // namespace ovrkit
