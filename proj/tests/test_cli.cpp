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

// Runs the built `ovrkit` executable and checks files and exit codes.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "json.hpp"
#include "ovrkit/text.hpp"
#include "support.hpp"

#ifndef OVRKIT_CLI_PATH
#error "OVRKIT_CLI_PATH must point at the ovrkit executable"
#endif

namespace ovrkit {
namespace {

using testing::TempDir;

struct Cli : ::testing::Test {
  TempDir dir{"cli"};

  // Exit status of `ovrkit <args>`, with stdout/stderr captured to files.
  int run(const std::string& args) {
    const std::string cmd = std::string(OVRKIT_CLI_PATH) + " " + args + " > " + dir.file("stdout") + " 2> " +
                            dir.file("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() { return text::read_file(dir.file("stdout")); }
  std::string err() { return text::read_file(dir.file("stderr")); }

  void SetUp() override {
    // Two labels driven by the sign of features 0 and 1.
    std::string data;
    for (int i = 0; i < 60; ++i) {
      const double a = ((i * 7) % 11 - 5) / 5.0, b = ((i * 5) % 13 - 6) / 6.0;
      std::string labels;
      if (a > 0) labels += "0";
      if (b > 0) labels += labels.empty() ? "1" : ",1";
      data += labels + (labels.empty() ? "" : " ") + "0:" + text::format_double(a) + " 1:" + text::format_double(b) +
              " 2:1\n";
    }
    text::write_file(dir.file("train.svm"), data);
  }
};

TEST_F(Cli, TrainBasicRoundTripsModel) {
  ASSERT_EQ(run("-q train --data " + dir.file("train.svm") + " --model " + dir.file("m.txt")), 0) << err();
  const auto model = text::read_file(dir.file("m.txt"));
  EXPECT_EQ(model.rfind("ovrkit-model 1\n", 0), 0u);
  ASSERT_EQ(run("-q train --data " + dir.file("train.svm") + " --model " + dir.file("m2.txt")), 0);
  EXPECT_EQ(text::read_file(dir.file("m2.txt")), model);
}

TEST_F(Cli, CostSensitiveSimpleRecordsGrid) {
  ASSERT_EQ(run("-q train --strategy cost-sensitive-simple --data " + dir.file("train.svm") + " --model " +
                dir.file("m.txt") + " --report " + dir.file("r.txt")),
            0)
      << err();
  const auto model = text::read_file(dir.file("m.txt"));
  const auto grid_at = model.find("grid simple;shared-folds;pairs=");
  ASSERT_NE(grid_at, std::string::npos);
  const auto line = model.substr(grid_at, model.find('\n', grid_at) - grid_at);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 34);
  EXPECT_NE(text::read_file(dir.file("r.txt")).find("strategy=cost-sensitive-simple"), std::string::npos);
}

TEST_F(Cli, UnrealisticIsGated) {
  EXPECT_EQ(run("-q train --strategy unrealistic --data " + dir.file("train.svm") + " --model " + dir.file("m.txt")),
            2);
  EXPECT_NE(err().find("allow-ground-truth"), std::string::npos);
  ASSERT_EQ(run("-q train --data " + dir.file("train.svm") + " --model " + dir.file("m.txt")), 0);
  EXPECT_EQ(run("-q predict --strategy unrealistic --model " + dir.file("m.txt") + " --data " +
                dir.file("train.svm")),
            2);
  ASSERT_EQ(run("predict --strategy unrealistic --allow-ground-truth --model " + dir.file("m.txt") + " --data " +
                dir.file("train.svm") + " --out " + dir.file("p.txt")),
            0);
  EXPECT_NE(err().find("warning"), std::string::npos);
}

TEST_F(Cli, PredictNoEmptyAndEval) {
  ASSERT_EQ(run("-q train --data " + dir.file("train.svm") + " --model " + dir.file("m.txt")), 0);
  ASSERT_EQ(run("-q predict --strategy no-empty --model " + dir.file("m.txt") + " --data " + dir.file("train.svm") +
                " --out " + dir.file("p.txt") + " --decisions " + dir.file("d.tsv")),
            0)
      << err();
  const auto dump = text::read_file(dir.file("p.txt"));
  EXPECT_EQ(dump.find("\n\n"), std::string::npos);
  EXPECT_NE(dump.front(), '\n');
  ASSERT_EQ(run("-q eval --truth " + dir.file("train.svm") + " --predictions " + dir.file("p.txt") + " --decisions " +
                dir.file("d.tsv") + " --k 1"),
            0)
      << err();
  const auto j = nlohmann::json::parse(out());
  EXPECT_GT(j["micro_f1"].get<double>(), 0.5);
  EXPECT_TRUE(j["micro_within_bound"].get<bool>());
  EXPECT_FALSE(j["precision_at_k"].is_null());
}

TEST_F(Cli, EvalHandFixtureAndMisalignment) {
  text::write_file(dir.file("truth.txt"), "0\n0,1\n");
  text::write_file(dir.file("pred.txt"), "0\n0\n");
  ASSERT_EQ(run("eval --truth " + dir.file("truth.txt") + " --predictions " + dir.file("pred.txt")), 0) << err();
  const auto j = nlohmann::json::parse(out());
  EXPECT_DOUBLE_EQ(j["macro_f1"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["micro_f1"].get<double>(), 0.8);
  text::write_file(dir.file("short.txt"), "0\n");
  EXPECT_EQ(run("eval --truth " + dir.file("truth.txt") + " --predictions " + dir.file("short.txt")), 2);
}

TEST_F(Cli, SplitIsSeeded) {
  ASSERT_EQ(run("split --data " + dir.file("train.svm") + " --seed 3 --plan " + dir.file("a.txt") + " --train-out " +
                dir.file("tr.svm") + " --test-out " + dir.file("te.svm") + " --folds 5 --folds-out " +
                dir.file("f.txt")),
            0)
      << err();
  ASSERT_EQ(run("split --n 60 --seed 3 --plan " + dir.file("b.txt")), 0);
  EXPECT_EQ(text::read_file(dir.file("a.txt")), text::read_file(dir.file("b.txt")));
  EXPECT_NE(text::read_file(dir.file("f.txt")).find("folds seed=3 k=5 n=48"), std::string::npos);
  const auto test_part = text::read_file(dir.file("te.svm"));
  EXPECT_EQ(std::count(test_part.begin(), test_part.end(), '\n'), 13);  // header + 12 rows
}

TEST_F(Cli, VerifyWritesBothReports) {
  ASSERT_EQ(run("-q verify --trials 50 --seed 4 --json " + dir.file("v.json") + " --text " + dir.file("v.txt")), 0)
      << err();
  EXPECT_TRUE(nlohmann::json::parse(text::read_file(dir.file("v.json")))["passed"].get<bool>());
  EXPECT_NE(text::read_file(dir.file("v.txt")).find("PASS"), std::string::npos);
  EXPECT_EQ(run("verify --trials 0"), 2);
}

TEST_F(Cli, ExperimentFromManifest) {
  std::string features, labels;
  for (int i = 0; i < 40; ++i) {
    const double a = ((i * 7) % 11 - 5) / 5.0;
    features += text::format_double(a) + " " + text::format_double(((i * 3) % 5) / 5.0) + "\n";
    labels += a > 0 ? "0\n" : "1\n";
  }
  text::write_file(dir.file("f.txt"), features);
  text::write_file(dir.file("l.txt"), labels);
  text::write_file(dir.file("cfg.json"), R"({"representations": [")" + dir.file("f.txt") +
                                             R"("], "labels": ")" + dir.file("l.txt") +
                                             R"(", "methods": ["basic", "unrealistic"], "seeds": [0, 1]})");
  EXPECT_EQ(run("-q experiment --config " + dir.file("cfg.json")), 2);
  ASSERT_EQ(run("-q experiment --config " + dir.file("cfg.json") + " --allow-ground-truth --output-dir " +
                dir.file("out")),
            0)
      << err();
  EXPECT_NE(out().find("Macro-F1"), std::string::npos);
  EXPECT_NE(text::read_file(dir.file("out/metrics.json")).find("\"ground_truth_used\": true"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("train --model x"), 2);
  EXPECT_EQ(run("predict --model /nonexistent --data /nonexistent"), 2);
  EXPECT_EQ(run("--help"), 0);
}

}  // namespace
}  // namespace ovrkit
