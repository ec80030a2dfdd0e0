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

// Batch front end over the C API.
// Exit codes: 0 success, 1 verification failure, 2 usage or data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ovrkit/ovrkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int exit_code;
  std::string message;
};

void check(ovr_status status) {
  if (status == OVR_OK) return;
  throw Failure{status == OVR_VERIFICATION ? kExitVerification : kExitUsage, ovr_last_error()};
}

struct CString {
  char* p = nullptr;
  CString() = default;
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  ~CString() { ovr_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Dataset = Handle<ovr_dataset, ovr_dataset_free>;
using Model = Handle<ovr_model, ovr_model_free>;
using Predictions = Handle<ovr_predictions, ovr_predictions_free>;

void write_text(const std::string& path, const std::string& contents) {
  if (path == "-") {
    std::cout << contents;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw Failure{kExitUsage, "cannot write " + path};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Where a dataset comes from: an svmlight file, or dense features plus a
// label file.
struct DataArgs {
  std::string data;
  std::string features;
  std::string labels;
  bool one_based = false;
  bool l2_normalize = false;

  void add(CLI::App* app, const std::string& role) {
    app->add_option("--data", data, role + " data in multi-label svmlight format");
    app->add_option("--features", features, role + " dense feature rows (with --labels)");
    app->add_option("--labels", labels, role + " label file aligned with --features");
    app->add_flag("--one-based-labels", one_based, "label ids in the files start at 1");
    app->add_flag("--l2-normalize", l2_normalize, "scale every instance to unit L2 norm");
  }

  void load(Dataset& out) const {
    if (!data.empty()) {
      check(ovr_dataset_load_svmlight(data.c_str(), one_based, l2_normalize, 0, 0, &out.p));
    } else if (!features.empty() && !labels.empty()) {
      check(ovr_dataset_load_dense(features.c_str(), labels.c_str(), one_based, l2_normalize, &out.p));
    } else {
      throw Failure{kExitUsage, "give --data, or --features together with --labels"};
    }
  }
};

// Training names accepted by `train`, including the experiment method names
// whose training step is one of the five strategies.
const std::map<std::string, std::string>& training_aliases() {
  static const std::map<std::string, std::string> m{
      {"basic", "basic"},
      {"one-vs-rest-basic", "basic"},
      {"no-empty", "basic"},
      {"one-vs-rest-no-empty", "basic"},
      {"unrealistic", "basic"},
      {"basic-C", "basic-C"},
      {"one-vs-rest-basic-C", "basic-C"},
      {"thresholding", "thresholding"},
      {"cost-sensitive", "cost-sensitive"},
      {"cost-sensitive-no-empty", "cost-sensitive"},
      {"cost-sensitive-simple", "cost-sensitive-simple"},
  };
  return m;
}

void log_to_stderr(int level, const char* message, void* user) {
  const bool quiet = *static_cast<bool*>(user);
  if (quiet && level == OVR_LOG_INFO) return;
  std::fprintf(stderr, "[ovrkit] %s%s\n", level == OVR_LOG_WARNING ? "warning: " : "", message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-vs-rest multi-label linear classification toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only log warnings");

  // split
  auto* split = app.add_subcommand("split", "Write a seeded train/test split plan");
  DataArgs split_data;
  split_data.add(split, "input");
  std::size_t split_n = 0;
  std::uint64_t split_seed = 0;
  double split_fraction = 0.8;
  std::string split_plan = "-", split_train, split_test;
  std::size_t split_k = 0;
  std::string split_folds;
  split->add_option("--n", split_n, "number of instances (instead of reading data)");
  split->add_option("--seed", split_seed, "split seed")->capture_default_str();
  split->add_option("--train-fraction", split_fraction, "fraction of instances used for training")
      ->capture_default_str();
  split->add_option("--plan", split_plan, "output path of the split plan ('-' = stdout)")->capture_default_str();
  split->add_option("--train-out", split_train, "write the training part as svmlight");
  split->add_option("--test-out", split_test, "write the test part as svmlight");
  split->add_option("--folds", split_k, "also draw k CV folds over the training part");
  split->add_option("--folds-out", split_folds, "output path of the fold plan");

  // train
  auto* train = app.add_subcommand("train", "Train a one-vs-rest model");
  DataArgs train_data;
  train_data.add(train, "training");
  std::string strategy = "basic", model_path, report_path, options_path;
  std::optional<double> train_C;
  std::vector<double> c_grid, fbr;
  std::optional<std::size_t> inner_k, k_folds, threads, max_iterations;
  std::optional<std::uint64_t> train_seed;
  std::optional<double> tolerance;
  bool train_allow_gt = false;
  train->add_option("--strategy", strategy,
                    "basic | basic-C | thresholding | cost-sensitive | cost-sensitive-simple "
                    "(method names such as one-vs-rest-no-empty are accepted)")
      ->capture_default_str();
  train->add_option("--model", model_path, "output model file")->required();
  train->add_option("--report", report_path, "output calibration report");
  train->add_option("--options", options_path, "JSON file of training options; flags override it");
  train->add_option("--C", train_C, "regularization parameter (basic, thresholding)");
  train->add_option("--c-grid", c_grid, "C values for basic-C");
  train->add_option("--fbr", fbr, "fbr candidates for thresholding");
  train->add_option("--inner-k", inner_k, "inner folds for thresholding");
  train->add_option("--k-folds", k_folds, "cross-validation folds");
  train->add_option("--seed", train_seed, "fold seed");
  train->add_option("--tolerance", tolerance, "relative gradient-norm tolerance");
  train->add_option("--max-iterations", max_iterations, "solver iteration cap");
  train->add_option("--threads", threads, "worker threads (0 = all cores)");
  train->add_flag("--allow-ground-truth", train_allow_gt, "permit --strategy unrealistic");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict label sets for test data");
  DataArgs predict_data;
  predict_data.add(predict, "test");
  std::string predict_model, predict_strategy = "basic", predictions_out = "-", decisions_out, predict_metrics;
  std::size_t predict_k = 1;
  bool predict_allow_gt = false;
  predict->add_option("--model", predict_model, "model file")->required();
  predict->add_option("--strategy", predict_strategy,
                      "basic | no-empty | as-calibrated | cost-sensitive-no-empty | top-k | unrealistic")
      ->capture_default_str();
  predict->add_option("--k", predict_k, "k for top-k and precision@k")->capture_default_str();
  predict->add_option("--out", predictions_out, "prediction dump ('-' = stdout)")->capture_default_str();
  predict->add_option("--decisions", decisions_out, "decision value TSV");
  predict->add_option("--metrics", predict_metrics, "also score against the test labels; JSON output path");
  predict->add_flag("--allow-ground-truth", predict_allow_gt,
                    "permit unrealistic, which reads the test label counts");

  // eval
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  std::string eval_truth, eval_predictions, eval_decisions, eval_out = "-";
  std::size_t eval_k = 1, eval_labels = 0;
  bool eval_one_based = false;
  eval->add_option("--truth", eval_truth, "svmlight data or label file")->required();
  eval->add_option("--predictions", eval_predictions, "prediction dump");
  eval->add_option("--decisions", eval_decisions, "decision value TSV (precision@k; sign rule if no dump)");
  eval->add_option("--k", eval_k, "k for precision@k")->capture_default_str();
  eval->add_option("--n-labels", eval_labels, "label vocabulary size (default: inferred)");
  eval->add_flag("--one-based-labels", eval_one_based, "label ids in the truth file start at 1");
  eval->add_option("--out", eval_out, "metrics JSON ('-' = stdout)")->capture_default_str();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the repeated-split comparison of methods");
  std::string config_path;
  std::vector<std::string> exp_features, exp_methods;
  std::vector<std::uint64_t> exp_seeds;
  std::string exp_labels, exp_output;
  std::optional<std::size_t> exp_threads;
  bool exp_allow_gt = false, exp_parallel = false;
  experiment->add_option("--config", config_path, "JSON experiment manifest");
  experiment->add_option("--feature-file", exp_features, "representation feature files (override)");
  experiment->add_option("--labels", exp_labels, "shared label file (override)");
  experiment->add_option("--methods", exp_methods, "methods to compare (override)");
  experiment->add_option("--seeds", exp_seeds, "split seeds (override)");
  experiment->add_option("--output-dir", exp_output, "directory for metrics.json, table.txt and splits");
  experiment->add_option("--threads", exp_threads, "worker threads (0 = all cores)");
  experiment->add_flag("--parallel-seeds", exp_parallel, "run seeds concurrently");
  experiment->add_flag("--allow-ground-truth", exp_allow_gt, "permit the unrealistic method");

  // verify
  auto* verify = app.add_subcommand("verify", "Check the Micro-F1 theorems on synthetic data");
  std::uint64_t verify_seed = 0;
  std::size_t trials = 1000;
  std::string verify_json, verify_text = "-";
  verify->add_option("--seed", verify_seed, "seed")->capture_default_str();
  verify->add_option("--trials", trials, "trials per theorem")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--json", verify_json, "JSON report path");
  verify->add_option("--text", verify_text, "text report path ('-' = stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  ovr_set_log_callback(log_to_stderr, &quiet);

  try {
    if (*split) {
      std::size_t n = split_n;
      Dataset data;
      if (n == 0) {
        split_data.load(data);
        ovr_dataset_info info{};
        check(ovr_dataset_info_get(data.p, &info));
        n = info.n_instances;
      }
      CString plan, digest;
      check(ovr_split_plan(n, split_seed, split_fraction, &plan.p, &digest.p));
      write_text(split_plan, plan.str());
      std::fprintf(stderr, "[ovrkit] split digest %s\n", digest.p);
      if (!split_train.empty() || !split_test.empty()) {
        if (!data.p) throw Failure{kExitUsage, "--train-out/--test-out need input data"};
        Dataset tr, te;
        check(ovr_dataset_split(data.p, plan.p, &tr.p, &te.p));
        if (!split_train.empty()) check(ovr_dataset_save_svmlight(tr.p, split_train.c_str()));
        if (!split_test.empty()) check(ovr_dataset_save_svmlight(te.p, split_test.c_str()));
      }
      if (split_k > 0) {
        // The second line of the plan lists the training positions.
        std::istringstream lines(plan.str());
        std::string header, train_line;
        std::getline(lines, header);
        std::getline(lines, train_line);
        std::istringstream tokens(train_line);
        std::string tok;
        std::size_t train_size = 0;
        tokens >> tok;  // "train"
        while (tokens >> tok) ++train_size;
        CString folds, fold_digest;
        check(ovr_fold_plan(train_size, split_k, split_seed, &folds.p, &fold_digest.p));
        write_text(split_folds.empty() ? std::string("-") : split_folds, folds.str());
      }
      return kExitOk;
    }

    if (*train) {
      const auto alias = training_aliases().find(strategy);
      if (alias == training_aliases().end()) throw Failure{kExitUsage, "unknown strategy '" + strategy + "'"};
      if (strategy == "unrealistic" && !train_allow_gt)
        throw Failure{kExitUsage,
                      "strategy 'unrealistic' evaluates with the test label counts; pass --allow-ground-truth"};
      nlohmann::json options = nlohmann::json::object();
      if (!options_path.empty()) {
        try {
          options = nlohmann::json::parse(read_text(options_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw Failure{kExitUsage, options_path + ": " + e.what()};
        }
      }
      if (train_C) options["C"] = *train_C;
      if (!c_grid.empty()) options["c_grid"] = c_grid;
      if (!fbr.empty()) options["fbr"] = fbr;
      if (inner_k) options["inner_k"] = *inner_k;
      if (k_folds) options["k_folds"] = *k_folds;
      if (train_seed) options["seed"] = *train_seed;
      if (tolerance) options["tolerance"] = *tolerance;
      if (max_iterations) options["max_iterations"] = *max_iterations;
      if (threads) options["threads"] = *threads;
      Dataset data;
      train_data.load(data);
      Model model;
      CString report;
      check(ovr_train(data.p, alias->second.c_str(), options.dump().c_str(), &model.p, &report.p));
      check(ovr_model_save(model.p, model_path.c_str()));
      if (!report_path.empty()) write_text(report_path, report.str());
      return kExitOk;
    }

    if (*predict) {
      Model model;
      check(ovr_model_load(predict_model.c_str(), &model.p));
      Dataset test;
      predict_data.load(test);
      if (predict_strategy == "unrealistic" && predict_allow_gt)
        std::fprintf(stderr, "[ovrkit] warning: unrealistic prediction uses the test labels in %s\n",
                     (predict_data.data.empty() ? predict_data.labels : predict_data.data).c_str());
      Predictions p;
      check(ovr_predict(model.p, test.p, predict_strategy.c_str(), predict_k, predict_allow_gt, &p.p));
      check(ovr_predictions_save(p.p, nullptr, decisions_out.empty() ? nullptr : decisions_out.c_str()));
      if (predictions_out == "-") {
        std::size_t n = 0;
        check(ovr_predictions_size(p.p, &n, nullptr));
        std::vector<std::uint32_t> buf(64);
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t count = 0;
          check(ovr_predictions_labels(p.p, i, buf.data(), buf.size(), &count));
          if (count > buf.size()) {
            buf.resize(count);
            check(ovr_predictions_labels(p.p, i, buf.data(), buf.size(), &count));
          }
          for (std::size_t j = 0; j < count; ++j) std::cout << (j ? "," : "") << buf[j];
          std::cout << "\n";
        }
      } else {
        check(ovr_predictions_save(p.p, predictions_out.c_str(), nullptr));
      }
      if (!predict_metrics.empty()) {
        CString metrics;
        check(ovr_predictions_evaluate(p.p, test.p, predict_k, &metrics.p));
        write_text(predict_metrics, metrics.str());
      }
      return kExitOk;
    }

    if (*eval) {
      CString metrics;
      check(ovr_evaluate_files(eval_truth.c_str(), eval_one_based, eval_labels,
                               eval_predictions.empty() ? nullptr : eval_predictions.c_str(),
                               eval_decisions.empty() ? nullptr : eval_decisions.c_str(), eval_k, &metrics.p));
      write_text(eval_out, metrics.str());
      return kExitOk;
    }

    if (*experiment) {
      nlohmann::json config = nlohmann::json::object();
      if (!config_path.empty()) {
        try {
          config = nlohmann::json::parse(read_text(config_path));
        } catch (const nlohmann::json::parse_error& e) {
          throw Failure{kExitUsage, config_path + ": " + e.what()};
        }
      }
      if (!exp_features.empty()) config["representations"] = exp_features;
      if (!exp_labels.empty()) config["labels"] = exp_labels;
      if (!exp_methods.empty()) config["methods"] = exp_methods;
      if (!exp_seeds.empty()) config["seeds"] = exp_seeds;
      if (!exp_output.empty()) config["output_dir"] = exp_output;
      if (exp_threads) config["threads"] = *exp_threads;
      if (exp_parallel) config["parallel_seeds"] = true;
      if (exp_allow_gt) config["allow_ground_truth"] = true;
      CString metrics, table;
      check(ovr_run_experiment(config.dump().c_str(), &metrics.p, &table.p));
      std::cout << table.str();
      return kExitOk;
    }

    if (*verify) {
      CString json, text;
      const auto status = ovr_verify(verify_seed, trials, &json.p, &text.p);
      if (json.p && !verify_json.empty()) write_text(verify_json, json.str());
      if (text.p && !verify_text.empty()) write_text(verify_text, text.str());
      check(status);
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "ovrkit: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return kExitUsage;
}
