// Copyright 2026 The graphscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "test_support.h"

#ifndef GRAPHSCORE_CLI
#error "GRAPHSCORE_CLI must name the graphscore executable"
#endif

namespace graphscore {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

constexpr const char* kTinyConfig = R"({
  "input": {"synth": {"n_people": 2000, "n_companies": 200, "periods": 16}},
  "scenario": {"scoring": "Behavioral", "max_samples_per_entity": 2},
  "features": {
    "node2vec": {"dimensions": 4, "walks_per_node": 2, "walk_length": 10},
    "gnn": {"models": 2, "hidden": 8, "epochs": 10, "embedding_dim": 4}
  },
  "model": {
    "grid": {"n_trees": [20], "max_depth": [2], "shrinkage": [0.1], "min_leaf": [5]},
    "folds": 3
  }
})";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { testing::write_text(dir_.file("tiny.json"), kTinyConfig); }

  // Runs the tool inside the temp directory; returns the exit status and
  // keeps stdout in `out_`.
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" + dir_.path().string() + "' && " + env + " '" +
                            GRAPHSCORE_CLI + "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    out_ = testing::read_text(dir_.file("stdout.txt"));
    err_ = testing::read_text(dir_.file("stderr.txt"));
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  TempDir dir_;
  std::string out_;
  std::string err_;
};

TEST_F(Cli, ConfigPrintsResolvedLayers) {
  ASSERT_EQ(run("--config tiny.json --seed 7 config", "GS_INPUT__SYNTH__BETA=0.25"), 0) << err_;
  const auto j = nlohmann::json::parse(out_);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["input"]["synth"]["n_people"], 2000);
  EXPECT_DOUBLE_EQ(j["input"]["synth"]["beta"].get<double>(), 0.25);
  EXPECT_EQ(j["model"]["folds"], 3);
}

TEST_F(Cli, ConfigurationProblemsExitWithTwo) {
  testing::write_text(dir_.file("bad.json"), R"({"sede": 1})");
  EXPECT_EQ(run("--config bad.json config"), 2);
  EXPECT_NE(err_.find("sede"), std::string::npos);
  EXPECT_EQ(run("--config absent.json config"), 2);
  EXPECT_EQ(run("--bogus config"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("--jobs 0 config"), 2);
  EXPECT_EQ(run("config", "GS_NOT__A__KEY=1"), 2);
}

TEST_F(Cli, StagesResumeAndGuardAgainstStaleInputs) {
  EXPECT_EQ(run("--out r select"), 3) << "missing upstream is a runtime error";

  ASSERT_EQ(run("--config tiny.json --out r run"), 0) << err_;
  EXPECT_TRUE(fs::exists(dir_.path() / "r/report/report.md"));
  ASSERT_EQ(run("--config tiny.json --out r run"), 0);
  EXPECT_NE(err_.find("up to date"), std::string::npos);

  EXPECT_EQ(run("--config tiny.json --out r train", "GS_SELECTION__RHO=0.5"), 2);
  EXPECT_NE(err_.find("stale"), std::string::npos);
  EXPECT_EQ(run("--config tiny.json --out r --force train", "GS_SELECTION__RHO=0.5"), 0);
  EXPECT_EQ(run("--config tiny.json --out r select", "GS_SELECTION__RHO=0.5"), 0);
  EXPECT_EQ(run("--config tiny.json --out r train", "GS_SELECTION__RHO=0.5"), 0);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  ASSERT_EQ(run("--config tiny.json --out a run"), 0) << err_;
  ASSERT_EQ(run("--config tiny.json --out b --jobs 2 run"), 0) << err_;
  for (const char* f : {"report/report.csv", "report/report.json", "report/report.md",
                        "report/treemap.json"})
    EXPECT_EQ(testing::read_text((dir_.path() / "a" / f).string()),
              testing::read_text((dir_.path() / "b" / f).string()))
        << f;
}

}  // namespace
}  // namespace graphscore
