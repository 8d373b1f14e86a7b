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

#include "graphscore/study.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "graphscore/manifest.h"
#include "test_support.h"

namespace graphscore::study {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using testing::TempDir;

// Small enough to run every stage in about a second.
ordered_json tiny_config(const std::string& out) {
  ordered_json cfg = default_config();
  overlay(cfg, json::parse(R"({
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
  })"));
  cfg["out"] = out;
  return cfg;
}

std::string slurp(const fs::path& p) { return testing::read_text(p.string()); }

TEST(Config, DefaultsParse) {
  const RunConfig c = RunConfig::from_json(default_config());
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.jobs, 1u);
  EXPECT_EQ(c.synth.n_people, 20000);
  EXPECT_EQ(c.scenario.scoring, pipeline::ScoringKind::Application);
  EXPECT_EQ(c.target.horizon, 12);
  EXPECT_EQ(c.features.gnn_models, 8u);
  EXPECT_EQ(c.evaluation.n_folds, 10u);
  EXPECT_DOUBLE_EQ(c.alpha, 0.05);
  EXPECT_TRUE(c.input_dir.empty());
}

TEST(Config, OverlayRejectsUnknownKeysAndWrongShapes) {
  ordered_json cfg = default_config();
  EXPECT_THROW(overlay(cfg, json::parse(R"({"sede": 3})")), ConfigError);
  EXPECT_THROW(overlay(cfg, json::parse(R"({"input": {"synth": {"people": 3}}})")),
               ConfigError);
  EXPECT_THROW(overlay(cfg, json::parse(R"({"input": 4})")), ConfigError);
  overlay(cfg, json::parse(R"({"model": {"grid": {"n_trees": [7]}}, "seed": 9})"));
  EXPECT_EQ(cfg["seed"], 9);
  EXPECT_EQ(cfg["model"]["grid"]["n_trees"], ordered_json::parse("[7]"));
  EXPECT_EQ(cfg["model"]["grid"]["max_depth"], ordered_json::parse("[3, 5]"));
}

TEST(Config, EnvironmentOverrides) {
  ordered_json cfg = default_config();
  apply_env_overrides(cfg, {{"GS_INPUT__SYNTH__BETA", "0"},
                            {"GS_OUT", "somewhere"},
                            {"GS_MODEL__GRID__N_TREES", "[50, 60]"},
                            {"GS_SCENARIO__SCORING", "Behavioral"}});
  const RunConfig c = RunConfig::from_json(cfg);
  EXPECT_DOUBLE_EQ(c.synth.beta, 0.0);
  EXPECT_EQ(c.out, "somewhere");
  EXPECT_EQ(c.evaluation.grid.n_trees, (std::vector<int>{50, 60}));
  EXPECT_EQ(c.scenario.scoring, pipeline::ScoringKind::Behavioral);

  ordered_json again = default_config();
  EXPECT_THROW(apply_env_overrides(again, {{"GS_INPUT__SYNTH__GAMMA", "1"}}), ConfigError);
  EXPECT_THROW(apply_env_overrides(again, {{"GS_INPUT", "1"}}), ConfigError);
}

TEST(Config, LoadConfigLayersFileOverDefaults) {
  TempDir dir;
  testing::write_text(dir.file("c.json"), "// header\n{\"seed\": 4, \"report\": {\"top_k\": 3}}");
  const RunConfig c = RunConfig::from_json(load_config(dir.file("c.json")));
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.top_k, 3u);
  testing::write_text(dir.file("bad.json"), "{ not json");
  EXPECT_THROW(load_config(dir.file("bad.json")), ConfigError);
  EXPECT_THROW(load_config(dir.file("absent.json")), ConfigError);
}

TEST(Config, InvalidValuesAreConfigErrors) {
  auto rejects = [](const char* patch) {
    ordered_json cfg = default_config();
    overlay(cfg, json::parse(patch));
    EXPECT_THROW(RunConfig::from_json(cfg), ConfigError) << patch;
  };
  rejects(R"({"jobs": 0})");
  rejects(R"({"seed": -1})");
  rejects(R"({"out": ""})");
  rejects(R"({"scenario": {"scoring": "Collections"}})");
  rejects(R"({"selection": {"ordering": "Gini"}})");
  rejects(R"({"report": {"alpha": 1.5}})");
  rejects(R"({"model": {"grid": {"n_trees": []}}})");
  rejects(R"({"input": {"synth": {"periods": 5}}})");
  rejects(R"({"input": {"dir": "/nonexistent/graphscore"}})");
}

TEST(StageHash, ChainsThroughUpstreamStages) {
  const ordered_json base = default_config();
  auto hashes = [](const ordered_json& j) {
    const RunConfig c = RunConfig::from_json(j);
    std::vector<std::string> h;
    for (Stage s : kStages) h.push_back(stage_hash(c, s));
    return h;
  };
  const auto h0 = hashes(base);

  ordered_json runtime = base;
  runtime["jobs"] = 4;
  runtime["out"] = "elsewhere";
  EXPECT_EQ(hashes(runtime), h0);

  ordered_json rho = base;
  rho["selection"]["rho"] = 0.6;
  const auto h1 = hashes(rho);
  EXPECT_EQ(h1[0], h0[0]);
  EXPECT_EQ(h1[1], h0[1]);
  for (std::size_t i = 2; i < h0.size(); ++i) EXPECT_NE(h1[i], h0[i]) << i;

  ordered_json beta = base;
  beta["input"]["synth"]["beta"] = 0.0;
  const auto h2 = hashes(beta);
  for (std::size_t i = 0; i < h0.size(); ++i) EXPECT_NE(h2[i], h0[i]) << i;

  ordered_json seed = base;
  seed["seed"] = 2;
  const auto h3 = hashes(seed);
  for (std::size_t i = 0; i < h0.size(); ++i) EXPECT_NE(h3[i], h0[i]) << i;
}

TEST(Stages, NamesRoundTrip) {
  for (Stage s : kStages) EXPECT_EQ(stage_from_string(to_string(s)), s);
  EXPECT_THROW(stage_from_string("deploy"), ConfigError);
  EXPECT_EQ(stage_directory(Stage::Synth), "data");
  EXPECT_TRUE(upstream_of(Stage::Synth).empty());
  EXPECT_EQ(upstream_of(Stage::Report).back(), Stage::Explain);
}

TEST(NodeClasses, DefaultersNonDefaultersAndOutsiders) {
  GraphBuilder b;
  for (const char* id : {"a", "b", "c"}) b.add_node(id);
  const Graph g = std::move(b).build();
  LabelTable labels;
  labels.add({"a", 3, 120.0, 1});
  labels.add({"b", 3, 10.0, 1});
  labels.add({"c", 2, 0.0, 1});
  EXPECT_EQ(node_classes(g, labels, 3, 90.0), (std::vector<int>{0, 1, 2}));
}

TEST(LabeledDataset, CsvRoundTrip) {
  pipeline::LabeledDataset ds;
  ds.samples = {{{"e1", 3}, 0}, {{"e2", 4}, 1}};
  ds.names = {"x", "Bench_Score", "deg"};
  ds.groups = {FeatureGroup::A, FeatureGroup::B, FeatureGroup::C};
  ds.columns = {{1.5, std::nan("")}, {0.25, 0.75}, {3, 0}};
  ds.provenance.assign(3, std::vector<Period>{3, 4});
  TempDir dir;
  write_labeled_dataset(ds, dir.path().string());
  const auto back = read_labeled_dataset(dir.path().string());
  EXPECT_EQ(back.samples.size(), 2u);
  EXPECT_EQ(back.samples[1].key.entity, "e2");
  EXPECT_EQ(back.samples[1].key.period, 4);
  EXPECT_EQ(back.samples[1].target, 1);
  EXPECT_EQ(back.names, ds.names);
  EXPECT_EQ(back.groups, ds.groups);
  EXPECT_DOUBLE_EQ(back.columns[0][0], 1.5);
  EXPECT_TRUE(std::isnan(back.columns[0][1]));
  EXPECT_DOUBLE_EQ(back.columns[1][1], 0.75);
}

TEST(Study, RunsResumesAndDetectsStaleness) {
  TempDir dir;
  const std::string out = (dir.path() / "run").string();
  const RunConfig cfg = RunConfig::from_json(tiny_config(out));

  std::vector<StageStatus> first;
  run_all(cfg, {}, [&](Stage, StageStatus st) { first.push_back(st); });
  ASSERT_EQ(first.size(), kStages.size());
  for (StageStatus st : first) EXPECT_EQ(st, StageStatus::Ran);

  const fs::path run(out);
  for (const char* f : {"report/report.csv", "report/report.json", "report/report.md",
                        "report/treemap.json", "train/cv.json", "explain/importance.csv",
                        "features/dataset.csv", "data/labels.csv"})
    EXPECT_TRUE(fs::exists(run / f)) << f;
  // Header plus eight sets times two metrics.
  const std::string report = slurp(run / "report/report.csv");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 17);
  const auto features = json::parse(slurp(run / "features/features.json"));
  EXPECT_EQ(features["leakage_violations"], 0);

  std::vector<StageStatus> second;
  run_all(cfg, {}, [&](Stage, StageStatus st) { second.push_back(st); });
  for (StageStatus st : second) EXPECT_EQ(st, StageStatus::UpToDate);

  // A changed selection setting leaves select stale for train.
  ordered_json changed = tiny_config(out);
  changed["selection"]["rho"] = 0.5;
  const RunConfig cfg2 = RunConfig::from_json(changed);
  EXPECT_EQ(run_stage(cfg2, Stage::Features), StageStatus::UpToDate);
  EXPECT_THROW(run_stage(cfg2, Stage::Train), StaleError);
  EXPECT_EQ(run_stage(cfg2, Stage::Select), StageStatus::Ran);
  EXPECT_EQ(run_stage(cfg2, Stage::Train), StageStatus::Ran);
  // The old configuration now sees a foreign select manifest.
  EXPECT_THROW(run_stage(cfg, Stage::Train), StaleError);
  EXPECT_EQ(run_stage(cfg, Stage::Train, {.force = true}), StageStatus::Ran);

  // Edited outputs are stale too.
  run_stage(cfg, Stage::Select, {.force = true});
  {
    std::ofstream touch(run / "features/dataset.csv", std::ios::app);
    touch << "\n";
  }
  EXPECT_THROW(run_stage(cfg, Stage::Select), StaleError);
}

TEST(Study, MissingUpstreamIsNotAConfigError) {
  TempDir dir;
  const RunConfig cfg = RunConfig::from_json(tiny_config((dir.path() / "run").string()));
  try {
    run_stage(cfg, Stage::Select);
    FAIL() << "expected an error";
  } catch (const ConfigError&) {
    FAIL() << "missing upstream reported as a configuration error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("features"), std::string::npos);
  }
}

TEST(Study, OutputsAreDeterministicAcrossRunsAndWorkers) {
  TempDir dir;
  ordered_json a = tiny_config((dir.path() / "a").string());
  ordered_json b = tiny_config((dir.path() / "b").string());
  b["jobs"] = 3;
  run_all(RunConfig::from_json(a));
  run_all(RunConfig::from_json(b));
  for (const char* f : {"report/report.csv", "report/report.json", "report/report.md",
                        "train/cv.json", "explain/importance.csv", "features/dataset.csv",
                        "select/selection.csv"})
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
}

TEST(Study, ReadsInputDirectoryInsteadOfGenerating) {
  TempDir dir;
  run_stage(RunConfig::from_json(tiny_config((dir.path() / "gen").string())), Stage::Synth);
  ordered_json cfg = tiny_config((dir.path() / "copy").string());
  cfg["input"]["dir"] = (dir.path() / "gen" / "data").string();
  const RunConfig c = RunConfig::from_json(cfg);
  run_stage(c, Stage::Synth);
  run_stage(c, Stage::Features);
  EXPECT_EQ(slurp(dir.path() / "gen/data/labels.csv"), slurp(dir.path() / "copy/data/labels.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "copy/features/dataset.csv"));
}

}  // namespace
}  // namespace graphscore::study
