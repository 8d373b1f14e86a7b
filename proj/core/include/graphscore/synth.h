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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphscore/graph.h"
#include "graphscore/labels.h"

namespace graphscore::synth {

// Desk-scale stand-in for a credit bureau population: people grouped in
// households (FamilyNet), companies linked to owners, employees and trading
// partners (EOWNET), monthly bureau attributes and delinquency labels.
//
// Each entity carries a latent log-odds
//   l_v = alpha + own_effect * u_v + e_v + beta * mean_{w ~ v} h(l_w - alpha)
// where u_v also drives the debt attributes, e_v is unobserved, and
// h(x) = influence_gain * influence_scale * tanh(x / (2 influence_scale)).
// r_v = sigmoid(l_v) is the twelve-period default probability.
struct SynthConfig {
  int n_people = 20000;
  int n_companies = 2000;
  int periods = 24;
  double beta = 1.0;
  // Per-period entry probability for entities outside the credit system.
  double entry_rate = 0.05;
  // Share of entities already in the system at the first period.
  double initial_banked = 0.5;
  // Logit-scale noise of Bench_Score for entities with six or more periods
  // of history, and for thin-file entities.
  double benchmark_noise = 0.6;
  double thin_file_noise = 1.5;
  double own_effect = 1.0;
  double idiosyncratic_sd = 0.8;
  double influence_gain = 0.8;
  double influence_scale = 2.0;
  // Loading of the debt attributes on u_v.
  double attribute_loading = 0.35;
  double missing_rate = 0.03;
  double employment_rate = 0.65;
  double churn = 0.03;
  // Monthly roll rates 30->60 and 60->90 days past due.
  double roll_30_60 = 0.5;
  double roll_60_90 = 0.6;
  double target_prevalence = 0.08;
  double min_prevalence = 0.03;
  double max_prevalence = 0.15;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

struct FixedPointResult {
  std::vector<double> values;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
};

// Jacobi iteration of x_v = base_v + beta * mean_{w ~ v} h(x_w) from x = base.
// Isolated nodes keep their base value.
FixedPointResult solve_latent_risk(const Graph& ties, std::span<const double> base, double beta,
                                   double gain, double scale, double tol = 1e-8,
                                   int max_iter = 200);

struct SynthDiagnostics {
  double alpha = 0.0;
  double prevalence = 0.0;
  int calibration_attempts = 0;
  int fixed_point_iterations = 0;
  double fixed_point_change = 0.0;
  std::size_t observation_points = 0;
};

struct SynthData {
  TemporalNetwork family;
  TemporalNetwork eow;
  NodeAttributeTable attributes;
  LabelTable labels;
  std::vector<std::pair<std::string, EntityKind>> entities;
  // Union of all ties; node index equals the position in `entities`.
  Graph ties;
  // Latent log-odds per entity.
  std::vector<double> latent;
  SynthDiagnostics diagnostics;
};

// Throws ConfigError when the prevalence cannot be brought inside
// [min_prevalence, max_prevalence] within 20 calibration attempts.
SynthData generate(const SynthConfig& cfg);

// family_edges.csv, eow_edges.csv, attributes.csv, labels.csv, entities.csv.
void write_dataset(const SynthData& data, const std::string& dir);

// Observation points used for calibration: entities in the system and not in
// default at t, with t after the first period and a complete target window.
struct Observation {
  std::size_t entity = 0;
  Period period = 0;
  int target = 0;
};
std::vector<Observation> observation_points(const SynthData& data, const TargetSpec& spec = {});

// AUC of the mean neighbor default probability as the only score over the
// observation points of entities with at least one tie.
double neighbor_mean_risk_auc(const SynthData& data, const TargetSpec& spec = {});

}  // namespace graphscore::synth
