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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphscore/feature_frame.h"
#include "graphscore/graph.h"

namespace graphscore::n2v {

struct N2VConfig {
  int dimensions = 8;
  int walks_per_node = 10;
  int walk_length = 40;
  int window = 5;
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  int negatives = 5;
  int epochs = 3;
  double learning_rate = 0.025;  // decays linearly to ~0 over training
  std::uint64_t seed = 1;
  unsigned jobs = 1;  // walk generation only

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

using Walk = std::vector<NodeIndex>;

// walks_per_node walks from every node. Walk r of the node with external id s
// draws from its own RNG stream keyed by (seed, s, r), so the corpus does not
// depend on node indexing or on the number of threads. Corpus order is
// round-major, nodes by external id within a round.
std::vector<Walk> biased_walks(const Graph& g, const N2VConfig& cfg);

// One vector per node, row-major, shared by the center and context roles.
struct SkipGramModel {
  std::size_t num_nodes = 0;
  std::size_t dims = 0;
  std::vector<double> vectors;

  std::span<const double> vector(std::size_t v) const {
    return {vectors.data() + v * dims, dims};
  }
};

// -log s(u.c) - sum_n log s(-u.v_n) for center u, context c and negatives.
// When `grad` is given (same shape as `m`), gradients are accumulated into it.
double sgns_loss(const SkipGramModel& m, std::size_t center, std::size_t context,
                 std::span<const std::size_t> negatives, SkipGramModel* grad = nullptr);

struct TrainResult {
  SkipGramModel model;
  std::vector<double> epoch_loss;  // mean pair loss per epoch
};

// SGD over (center, context) pairs within `window` positions, with negatives
// drawn from the unigram^0.75 distribution of the corpus. Pairs whose context
// is the center node are skipped, as are negatives equal to the center or the
// context. Vectors start as N(0, 1/d) draws.
TrainResult train_skipgram(const std::vector<Walk>& corpus, std::size_t num_nodes,
                           const N2VConfig& cfg);

// Walks plus training, in a canonical index space ordered by external id.
// Row v of the result is node v of g.
TrainResult embed(const Graph& g, const N2VConfig& cfg);

std::string column_name(int dim, const std::string& network);

// Group E frame with N2V_EMB_01.._<Network> columns. Temporal networks are
// embedded per period (restricted to `periods` when given); static networks
// once, under kStaticPeriod. Entities absent from a snapshot read as zeros
// with the presence indicator at 0.
FeatureFrame n2v_frame(const TemporalNetwork& net, const N2VConfig& cfg,
                       const std::optional<std::vector<Period>>& periods = std::nullopt);

}  // namespace graphscore::n2v
