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

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "graphscore/study.h"

namespace {

using graphscore::study::Stage;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

struct Flags {
  std::string config;
  std::optional<long long> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  bool force = false;
};

graphscore::study::RunConfig resolve(const Flags& flags) {
  auto j = graphscore::study::load_config(flags.config);
  nlohmann::json cli = nlohmann::json::object();
  if (flags.seed) cli["seed"] = *flags.seed;
  if (flags.jobs) cli["jobs"] = *flags.jobs;
  if (flags.out) cli["out"] = *flags.out;
  graphscore::study::overlay(j, cli);
  return graphscore::study::RunConfig::from_json(j);
}

void report(Stage s, graphscore::study::StageStatus st) {
  spdlog::info("{}: {}", graphscore::study::to_string(s),
               st == graphscore::study::StageStatus::Ran ? "done" : "up to date");
}

}  // namespace

int main(int argc, char** argv) {
  // Progress and errors go to stderr so stdout stays machine readable.
  spdlog::set_default_logger(spdlog::stderr_color_mt("graphscore"));
  CLI::App app{"Blends graph features into gradient-boosted credit scores and reports the lift."};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "JSON run configuration (defaults when omitted)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Root seed");
  app.add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out, "Run directory");
  app.add_flag("--force", flags.force, "Rerun and accept stale upstream outputs");

  std::optional<Stage> stage;
  bool all = false;
  bool show = false;
  for (Stage s : graphscore::study::kStages) {
    const std::string name(graphscore::study::to_string(s));
    const char* help = "";
    switch (s) {
      case Stage::Synth: help = "Generate (or copy) the input networks, attributes and labels"; break;
      case Stage::Features: help = "Sample the scenario and extract feature groups A to E"; break;
      case Stage::Select: help = "Split off the tuning slice and run two-stage selection"; break;
      case Stage::Train: help = "Tune hyper-parameters and cross-validate the eight feature sets"; break;
      case Stage::Explain: help = "Aggregate out-of-fold attributions into importance data"; break;
      case Stage::Report: help = "Write the relative-improvement tables and treemap data"; break;
    }
    app.add_subcommand(name, help)->callback([&stage, s] { stage = s; });
  }
  app.add_subcommand("run", "Run every stage, skipping those already up to date")
      ->callback([&all] { all = true; });
  app.add_subcommand("config", "Print the resolved configuration")->callback([&show] { show = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const auto cfg = resolve(flags);
    if (show) {
      std::puts(cfg.raw.dump(2).c_str());
      return kOk;
    }
    const graphscore::study::StageOptions options{flags.force};
    if (all) {
      graphscore::study::run_all(cfg, options, report);
    } else {
      report(*stage, graphscore::study::run_stage(cfg, *stage, options));
    }
    return kOk;
  } catch (const graphscore::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kStageFailure;
  }
}
