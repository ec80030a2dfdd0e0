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

#include "ovrkit/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "json.hpp"
#include "ovrkit/error.hpp"
#include "ovrkit/log.hpp"
#include "ovrkit/parallel.hpp"
#include "ovrkit/rng.hpp"
#include "ovrkit/text.hpp"

namespace ovrkit {
namespace {

using Json = nlohmann::json;

struct MethodName {
  Method method;
  std::string_view name;
  std::string_view alias;
};

constexpr std::array<MethodName, 8> kMethodNames{{
    {Method::kUnrealistic, "unrealistic", "unrealistic"},
    {Method::kBasic, "one-vs-rest-basic", "basic"},
    {Method::kBasicC, "one-vs-rest-basic-C", "basic-C"},
    {Method::kNoEmpty, "one-vs-rest-no-empty", "no-empty"},
    {Method::kThresholding, "thresholding", "thresholding"},
    {Method::kCostSensitive, "cost-sensitive", "cost-sensitive"},
    {Method::kCostSensitiveNoEmpty, "cost-sensitive-no-empty", "cost-sensitive-no-empty"},
    {Method::kCostSensitiveSimple, "cost-sensitive-simple", "cost-sensitive-simple"},
}};

template <typename T>
T get_as(const Json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::kParse, "config key '" + std::string(key) + "' has the wrong type");
  }
}

std::vector<double> get_reals(const Json& j, std::string_view key) {
  if (!j.is_array()) fail(ErrorCode::kParse, "config key '" + std::string(key) + "' must be an array");
  return get_as<std::vector<double>>(j, key);
}

std::size_t get_count(const Json& j, std::string_view key) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    fail(ErrorCode::kParse, "config key '" + std::string(key) + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// Models trained for one (representation, seed); prediction-only methods
// share them.
struct ModelCache {
  std::map<TrainStrategy, OvRModel> models;
};

OvRModel train_strategy(TrainStrategy s, const SparseDataset& train, const FoldPlan& folds,
                        const ExperimentConfig& config) {
  PhaseTimer timer("train " + std::string(to_string(s)));
  switch (s) {
    case TrainStrategy::kBasic:
      return train_ovr_basic(train, config.basic_C, config.train);
    case TrainStrategy::kBasicC: {
      const CGrid grid = config.c_grid.empty() ? CGrid::default_grid() : CGrid(config.c_grid);
      return train_ovr_basic_C(train, grid, folds, config.train);
    }
    case TrainStrategy::kThresholding:
      return calibrate_thresholding(train, config.thresholding, folds, config.train);
    case TrainStrategy::kCostSensitive:
      return calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kDense), folds, config.train);
    case TrainStrategy::kCostSensitiveSimple:
      return calibrate_cost_sensitive(train, build_cost_grid(CostGridKind::kSimple), folds, config.train);
  }
  fail(ErrorCode::kInvalidArgument, "unknown training strategy");
}

struct Stats {
  double mean = 0;
  double std = 0;
};

// Sample standard deviation (n - 1); 0 for a single run.
Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  // Counts code points so "±" occupies one column.
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80;
  if (cols < width) s.append(width - cols, ' ');
  return s;
}

SparseDataset load_representation(const ExperimentConfig& config, const Representation& rep) {
  PhaseTimer timer("load " + rep.name);
  if (config.format == DataFormat::kDensePair) return load_dense_pair(rep.features, config.labels, config.parse);
  return load_svmlight(rep.features, config.parse);
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& e : kMethodNames)
    if (e.method == m) return e.name;
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& e : kMethodNames)
    if (e.name == name || e.alias == name) return e.method;
  fail(ErrorCode::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& e : kMethodNames) out.push_back(e.method);
  return out;
}

TrainStrategy training_for(Method m) {
  switch (m) {
    case Method::kUnrealistic:
    case Method::kBasic:
    case Method::kNoEmpty:
      return TrainStrategy::kBasic;
    case Method::kBasicC:
      return TrainStrategy::kBasicC;
    case Method::kThresholding:
      return TrainStrategy::kThresholding;
    case Method::kCostSensitive:
    case Method::kCostSensitiveNoEmpty:
      return TrainStrategy::kCostSensitive;
    case Method::kCostSensitiveSimple:
      return TrainStrategy::kCostSensitiveSimple;
  }
  return TrainStrategy::kBasic;
}

PredictStrategy prediction_for(Method m) {
  switch (m) {
    case Method::kUnrealistic:
      return PredictStrategy::kUnrealistic;
    case Method::kBasic:
    case Method::kBasicC:
      return PredictStrategy::kBasic;
    case Method::kNoEmpty:
      return PredictStrategy::kNoEmpty;
    case Method::kThresholding:
    case Method::kCostSensitive:
    case Method::kCostSensitiveSimple:
      return PredictStrategy::kAsCalibrated;
    case Method::kCostSensitiveNoEmpty:
      return PredictStrategy::kCostSensitiveNoEmpty;
  }
  return PredictStrategy::kBasic;
}

void ExperimentConfig::validate() const {
  if (representations.empty()) fail(ErrorCode::kInvalidArgument, "experiment needs at least one representation");
  std::set<std::string> names;
  for (const auto& r : representations) {
    if (r.name.empty()) fail(ErrorCode::kInvalidArgument, "representation name is empty");
    if (!names.insert(r.name).second)
      fail(ErrorCode::kInvalidArgument, "duplicate representation name '" + r.name + "'");
  }
  if (format == DataFormat::kDensePair && labels.empty())
    fail(ErrorCode::kInvalidArgument, "the dense format needs a label file");
  if (seeds.empty()) fail(ErrorCode::kInvalidArgument, "experiment needs at least one seed");
  if (!(train_fraction > 0 && train_fraction < 1)) fail(ErrorCode::kInvalidArgument, "train_fraction must be in (0, 1)");
  if (k_folds < 2) fail(ErrorCode::kInvalidArgument, "k_folds must be at least 2");
  if (!(basic_C > 0)) fail(ErrorCode::kInvalidArgument, "basic_C must be positive");
  if (!(thresholding.C > 0)) fail(ErrorCode::kInvalidArgument, "threshold_C must be positive");
  if (thresholding.fbr_candidates.empty()) fail(ErrorCode::kInvalidArgument, "fbr list is empty");
  if (thresholding.inner_k < 2) fail(ErrorCode::kInvalidArgument, "inner_k must be at least 2");
  if (!c_grid.empty()) CGrid check(c_grid);
  if (methods.empty()) fail(ErrorCode::kInvalidArgument, "experiment needs at least one method");
  const bool unrealistic = std::find(methods.begin(), methods.end(), Method::kUnrealistic) != methods.end();
  if (unrealistic && !allow_ground_truth)
    fail(ErrorCode::kGroundTruthGate,
         "method 'unrealistic' reads test label counts; enable allow_ground_truth to run it");
}

ExperimentConfig parse_experiment_config(std::string_view json) {
  Json j;
  try {
    j = Json::parse(json);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kParse, "config must be a JSON object");

  ExperimentConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "representations") {
      if (!v.is_array()) fail(ErrorCode::kParse, "representations must be an array");
      for (const auto& r : v) {
        if (r.is_string()) {
          const auto path = r.get<std::string>();
          c.representations.push_back({stem(path), path});
        } else if (r.is_object()) {
          for (auto f = r.begin(); f != r.end(); ++f)
            if (f.key() != "name" && f.key() != "features")
              fail(ErrorCode::kParse, "unknown representation key '" + f.key() + "'");
          if (!r.contains("features")) fail(ErrorCode::kParse, "representation without 'features'");
          Representation rep;
          rep.features = get_as<std::string>(r["features"], "features");
          rep.name = r.contains("name") ? get_as<std::string>(r["name"], "name") : stem(rep.features);
          c.representations.push_back(std::move(rep));
        } else {
          fail(ErrorCode::kParse, "representation entries must be paths or objects");
        }
      }
    } else if (key == "labels") {
      c.labels = get_as<std::string>(v, key);
    } else if (key == "format") {
      const auto f = get_as<std::string>(v, key);
      if (f == "dense") {
        c.format = DataFormat::kDensePair;
      } else if (f == "svmlight") {
        c.format = DataFormat::kSvmlightMultilabel;
      } else {
        fail(ErrorCode::kParse, "format must be 'dense' or 'svmlight'");
      }
    } else if (key == "one_based_labels") {
      c.parse.one_based_labels = get_as<bool>(v, key);
    } else if (key == "l2_normalize") {
      c.parse.l2_normalize = get_as<bool>(v, key);
    } else if (key == "methods") {
      if (!v.is_array()) fail(ErrorCode::kParse, "methods must be an array");
      for (const auto& m : v) c.methods.push_back(parse_method(get_as<std::string>(m, key)));
    } else if (key == "seeds") {
      if (!v.is_array()) fail(ErrorCode::kParse, "seeds must be an array");
      c.seeds.clear();
      for (const auto& s : v) c.seeds.push_back(get_count(s, key));
    } else if (key == "train_fraction") {
      c.train_fraction = get_as<double>(v, key);
    } else if (key == "k_folds") {
      c.k_folds = get_count(v, key);
    } else if (key == "c_grid") {
      c.c_grid = get_reals(v, key);
    } else if (key == "basic_C") {
      c.basic_C = get_as<double>(v, key);
    } else if (key == "threshold_C") {
      c.thresholding.C = get_as<double>(v, key);
    } else if (key == "fbr") {
      c.thresholding.fbr_candidates = get_reals(v, key);
    } else if (key == "inner_k") {
      c.thresholding.inner_k = get_count(v, key);
    } else if (key == "tolerance") {
      c.train.solver.tolerance = get_as<double>(v, key);
    } else if (key == "threads") {
      c.train.threads = get_count(v, key);
    } else if (key == "parallel_seeds") {
      c.parallel_seeds = get_as<bool>(v, key);
    } else if (key == "allow_ground_truth") {
      c.allow_ground_truth = get_as<bool>(v, key);
    } else if (key == "output_dir") {
      c.output_dir = get_as<std::string>(v, key);
    } else {
      fail(ErrorCode::kParse, "unknown config key '" + key + "'");
    }
  }
  if (c.methods.empty())
    for (Method m : all_methods())
      if (m != Method::kUnrealistic) c.methods.push_back(m);
  return c;
}

std::string format_table(const std::vector<RunResult>& runs, const std::vector<std::string>& representations,
                         const std::vector<Method>& methods) {
  std::size_t name_width = 6;
  for (Method m : methods) name_width = std::max(name_width, to_string(m).size() + 2);
  std::size_t cell_width = 15;
  for (const auto& r : representations) cell_width = std::max(cell_width, r.size() + 2);

  std::string out;
  for (const bool macro : {true, false}) {
    out += macro ? "Macro-F1\n" : "Micro-F1\n";
    out += pad("method", name_width);
    for (const auto& r : representations) out += pad(r, cell_width);
    out += "\n";
    for (Method m : methods) {
      out += pad(std::string(to_string(m)), name_width);
      for (const auto& r : representations) {
        std::vector<double> xs;
        for (const auto& run : runs)
          if (run.method == m && run.representation == r)
            xs.push_back(macro ? run.metrics.macro_f1 : run.metrics.micro_f1);
        const auto s = stats(xs);
        out += pad(xs.empty() ? std::string("-") : fixed(s.mean, 3) + " ± " + fixed(s.std, 3), cell_width);
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += "\n";
    }
    if (macro) out += "\n";
  }
  const bool gt = std::find(methods.begin(), methods.end(), Method::kUnrealistic) != methods.end();
  if (gt) out += "\nunrealistic reads the true label count of each test instance; its scores are not attainable.\n";
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  PhaseTimer total("experiment");

  std::vector<SparseDataset> data;
  data.reserve(config.representations.size());
  for (const auto& rep : config.representations) data.push_back(load_representation(config, rep));
  for (std::size_t r = 1; r < data.size(); ++r) {
    if (data[r].n_instances() != data[0].n_instances())
      fail(ErrorCode::kDimension, "representation '" + config.representations[r].name + "' has " +
                                      std::to_string(data[r].n_instances()) + " instances, expected " +
                                      std::to_string(data[0].n_instances()));
    if (data[r].label_sets() != data[0].label_sets())
      fail(ErrorCode::kInvalidArgument,
           "representation '" + config.representations[r].name + "' disagrees with the others on labels");
  }
  const std::size_t n = data[0].n_instances();

  // One split and one fold plan per seed, shared by every representation.
  std::vector<SplitPlan> splits;
  std::vector<FoldPlan> folds;
  for (auto seed : config.seeds) {
    splits.push_back(make_split(n, seed, config.train_fraction));
    folds.push_back(make_folds(splits.back().train_indices.size(), config.k_folds, derive_seed(seed, 1)));
  }

  std::vector<TrainStrategy> needed;
  for (Method m : config.methods)
    if (std::find(needed.begin(), needed.end(), training_for(m)) == needed.end()) needed.push_back(training_for(m));

  const std::size_t n_reps = config.representations.size();
  const std::size_t n_seeds = config.seeds.size();
  std::vector<std::vector<RunResult>> slots(n_reps * n_seeds);

  auto run_one = [&](std::size_t slot) {
    const std::size_t r = slot / n_seeds;
    const std::size_t s = slot % n_seeds;
    const auto& rep = config.representations[r];
    const auto train = data[r].subset(splits[s].train_indices);
    const auto test = data[r].subset(splits[s].test_indices);
    const auto truth = test.label_sets();
    const auto counts = set_sizes(truth);
    log_info("run " + rep.name + " seed " + std::to_string(config.seeds[s]) + ": " +
             std::to_string(train.n_instances()) + " train, " + std::to_string(test.n_instances()) + " test");

    ModelCache cache;
    for (TrainStrategy t : needed) cache.models.emplace(t, train_strategy(t, train, folds[s], config));

    std::map<TrainStrategy, DecisionMatrix> decisions;
    {
      PhaseTimer timer("predict " + rep.name + " seed " + std::to_string(config.seeds[s]));
      for (const auto& [t, model] : cache.models) decisions.emplace(t, decision_matrix(model, test, config.train.threads));
    }
    for (Method m : config.methods) {
      const auto& dm = decisions.at(training_for(m));
      const auto p = predict(dm, prediction_for(m), 0, counts);
      RunResult result;
      result.representation = rep.name;
      result.method = m;
      result.seed = config.seeds[s];
      result.metrics = evaluate(truth, p.predicted, test.n_labels(), &dm, 1);
      result.metrics.strategy = std::string(to_string(m));
      result.metrics.used_ground_truth = p.used_ground_truth;
      slots[slot].push_back(std::move(result));
    }
  };

  if (config.parallel_seeds) {
    parallel_for(slots.size(), 0, run_one);
  } else {
    for (std::size_t i = 0; i < slots.size(); ++i) run_one(i);
  }

  ExperimentResult result;
  for (std::size_t r = 0; r < n_reps; ++r)
    for (std::size_t s = 0; s < n_seeds; ++s)
      result.provenance.push_back(
          {config.representations[r].name, config.seeds[s], digest(splits[s]), digest(folds[s])});
  for (auto& slot : slots)
    for (auto& run : slot) result.runs.push_back(std::move(run));

  std::vector<std::string> rep_names;
  for (const auto& rep : config.representations) rep_names.push_back(rep.name);
  result.table = format_table(result.runs, rep_names, config.methods);

  nlohmann::ordered_json j;
  j["n_instances"] = n;
  j["n_labels"] = data[0].n_labels();
  j["train_fraction"] = config.train_fraction;
  j["k_folds"] = config.k_folds;
  j["seeds"] = config.seeds;
  j["allow_ground_truth"] = config.allow_ground_truth;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (Method m : config.methods) methods.push_back(std::string(to_string(m)));
  auto& prov = j["provenance"] = nlohmann::ordered_json::array();
  for (const auto& p : result.provenance)
    prov.push_back({{"representation", p.representation},
                    {"seed", p.seed},
                    {"split_digest", p.split_digest},
                    {"fold_digest", p.fold_digest}});
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : result.runs) {
    nlohmann::ordered_json e;
    e["representation"] = run.representation;
    e["method"] = std::string(to_string(run.method));
    e["seed"] = run.seed;
    e["metrics"] = nlohmann::ordered_json::parse(to_json(run.metrics));
    runs.push_back(std::move(e));
  }
  auto& summary = j["summary"] = nlohmann::ordered_json::array();
  for (const auto& rep : rep_names)
    for (Method m : config.methods) {
      std::vector<double> macro, micro;
      for (const auto& run : result.runs)
        if (run.method == m && run.representation == rep) {
          macro.push_back(run.metrics.macro_f1);
          micro.push_back(run.metrics.micro_f1);
        }
      const auto ma = stats(macro);
      const auto mi = stats(micro);
      summary.push_back({{"representation", rep},
                         {"method", std::string(to_string(m))},
                         {"runs", macro.size()},
                         {"macro_f1_mean", ma.mean},
                         {"macro_f1_std", ma.std},
                         {"micro_f1_mean", mi.mean},
                         {"micro_f1_std", mi.std}});
    }
  result.metrics_json = j.dump(2) + "\n";

  if (!config.output_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(config.output_dir) / "splits", ec);
    if (ec) fail(ErrorCode::kIo, "cannot create " + config.output_dir + ": " + ec.message());
    text::write_file((fs::path(config.output_dir) / "metrics.json").string(), result.metrics_json);
    text::write_file((fs::path(config.output_dir) / "table.txt").string(), result.table);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const auto name = "seed_" + std::to_string(config.seeds[s]);
      text::write_file((fs::path(config.output_dir) / "splits" / (name + ".txt")).string(), to_text(splits[s]));
      text::write_file((fs::path(config.output_dir) / "splits" / (name + "_folds.txt")).string(), to_text(folds[s]));
    }
  }
  return result;
}

}  // namespace ovrkit
