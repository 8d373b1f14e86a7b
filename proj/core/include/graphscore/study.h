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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphscore/dataset.h"
#include "graphscore/evaluation.h"
#include "graphscore/gnn.h"
#include "graphscore/graph.h"
#include "graphscore/labels.h"
#include "graphscore/netstats.h"
#include "graphscore/node2vec.h"
#include "graphscore/synth.h"

namespace graphscore::study {

// An upstream stage was produced under a different configuration.
class StaleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Built-in configuration; every accepted key appears here.
nlohmann::ordered_json default_config();

// Recursively overlays `patch` on `base`. Keys absent from `base` throw
// ConfigError naming the full path; arrays and scalars are replaced.
void overlay(nlohmann::ordered_json& base, const nlohmann::json& patch);

// GS_<KEY>[__<KEY>...]=<value> sets the lower-cased key path; the value is
// parsed as JSON and taken as a string when that fails. Unknown paths throw
// ConfigError.
void apply_env_overrides(nlohmann::ordered_json& cfg,
                         const std::vector<std::pair<std::string, std::string>>& vars);
// GS_* variables of the process environment, sorted by name.
std::vector<std::pair<std::string, std::string>> environment_overrides();

// Defaults, then the file (when a path is given, JSON with // or /* */
// comments allowed), then the process GS_* variables.
nlohmann::ordered_json load_config(const std::string& path);

struct FeatureConfig {
  netstats::NodeStatsOptions stats;
  // Ego aggregates cover the node attributes plus, when set, the node
  // statistics of the same network.
  bool ego_stats = true;
  std::vector<std::string> ego_weights = {"PageRank"};
  bool node2vec = true;
  n2v::N2VConfig n2v;
  bool gcn = true;
  bool gae = true;
  std::size_t gnn_models = 8;
  gnn::GnnConfig gnn;
};

struct RunConfig {
  nlohmann::ordered_json raw;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
  // Input directory with the five CSV files; empty means generate.
  std::string input_dir;
  synth::SynthConfig synth;
  pipeline::ScenarioSpec scenario;
  TargetSpec target;
  FeatureConfig features;
  evaluation::EvaluationConfig evaluation;
  double alpha = 0.05;
  std::size_t top_k = 10;

  // Parses and validates; throws ConfigError.
  static RunConfig from_json(const nlohmann::ordered_json& j);
};

// Stream tags under the root seed.
enum SeedStream : std::uint64_t { kSynthSeed = 1, kFeatureSeed, kSamplingSeed, kEvaluationSeed };

struct StudyInputs {
  TemporalNetwork family;  // FamilyNet, static
  TemporalNetwork eow;     // EOWNET, one snapshot per period
  NodeAttributeTable attributes;
  LabelTable labels;
  EntityKinds kinds;
};

// family_edges.csv, eow_edges.csv, attributes.csv, labels.csv, entities.csv
inline constexpr std::array<const char*, 5> kInputFiles = {
    "family_edges.csv", "eow_edges.csv", "attributes.csv", "labels.csv", "entities.csv"};
StudyInputs load_inputs(const std::string& dir);

// GCN training classes at period p: 0 defaulter, 1 non-defaulter, 2 not in
// the credit system.
std::vector<int> node_classes(const Graph& g, const LabelTable& labels, Period p,
                              double threshold);

struct FeatureBuild {
  pipeline::LabeledDataset dataset;
  pipeline::SamplingStats sampling;
  std::vector<gnn::GnnModel> models;
  std::vector<pipeline::LeakageViolation> leakage;
};

// Group A and B from the attributes; C, D and E for both networks computed
// only for the sample periods (and ego features only for sample keys). GCN
// and GAE models are fitted on the first labelled period, which is never
// sampled.
FeatureBuild build_features(const StudyInputs& in, const pipeline::ScenarioSpec& scenario,
                            const TargetSpec& target, const FeatureConfig& cfg,
                            std::uint64_t seed, unsigned jobs = 1);

// dataset.csv (entity,period,target,<features>) and columns.csv
// (feature,group). Provenance is not stored.
void write_labeled_dataset(const pipeline::LabeledDataset& ds, const std::string& dir);
pipeline::LabeledDataset read_labeled_dataset(const std::string& dir);

enum class Stage : std::uint8_t { Synth, Features, Select, Train, Explain, Report };
inline constexpr std::array<Stage, 6> kStages = {Stage::Synth, Stage::Features, Stage::Select,
                                                 Stage::Train, Stage::Explain, Stage::Report};
std::string_view to_string(Stage s);
Stage stage_from_string(std::string_view s);
// Output directory name under the run directory.
std::string_view stage_directory(Stage s);
std::vector<Stage> upstream_of(Stage s);

// Hash of the configuration a stage's outputs depend on, chained through its
// upstream stages. Worker count and output path are excluded.
std::string stage_hash(const RunConfig& cfg, Stage s);

enum class StageStatus : std::uint8_t { Ran, UpToDate };

struct StageOptions {
  // Rerun even when up to date and accept stale upstream outputs.
  bool force = false;
};

// Runs one stage. Missing upstream outputs throw Error; an upstream manifest
// whose hash differs from the current configuration (or whose outputs
// changed) throws StaleError unless forced. A stage whose manifest matches is
// left alone.
StageStatus run_stage(const RunConfig& cfg, Stage s, const StageOptions& options = {});

// Every stage in order.
void run_all(const RunConfig& cfg, const StageOptions& options = {},
             const std::function<void(Stage, StageStatus)>& on_stage = {});

}  // namespace graphscore::study
