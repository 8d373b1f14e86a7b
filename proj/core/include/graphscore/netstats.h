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
#include <string>
#include <string_view>
#include <vector>

#include "graphscore/feature_frame.h"
#include "graphscore/graph.h"

namespace graphscore::netstats {

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-10;
  int max_iter = 200;
  // Transition probabilities proportional to edge weight; uniform otherwise.
  bool weighted = true;
};

struct IterativeResult {
  int iterations = 0;
  bool converged = false;
};

struct PageRankResult : IterativeResult {
  std::vector<double> scores;
};

// Power iteration; dangling (isolated) nodes redistribute uniformly.
// Converged once the L1 change falls below tol.
PageRankResult pagerank(const Graph& g, const PageRankOptions& options = {});

struct HitsOptions {
  double tol = 1e-10;
  int max_iter = 200;
  // Use the orientation recorded at ingestion instead of the symmetric
  // adjacency.
  bool directed = false;
};

struct HitsResult : IterativeResult {
  std::vector<double> authority;
  std::vector<double> hub;
};

// L2-normalized authority and hub scores. On the symmetric adjacency both
// equal the principal eigenvector of A (power iteration on A + I, which has
// the same eigenvectors and no bipartite oscillation).
HitsResult hits(const Graph& g, const HitsOptions& options = {});

// Triangles incident to each node.
std::vector<std::uint64_t> triads(const Graph& g);

// 1 for nodes whose removal increases the number of connected components.
std::vector<std::uint8_t> articulation_points(const Graph& g);

// 1 per edge index for edges whose removal disconnects their endpoints.
std::vector<std::uint8_t> bridges(const Graph& g);

struct NodeStatsOptions {
  PageRankOptions pagerank;
  HitsOptions hits;
  // Adds NodeStats_WDegree_<Network> (sum of incident edge weights).
  bool weighted_degree = false;
};

// Statistic identifiers in column order: Degree, DegreeCentr, Triads,
// PageRank, ArtPoint, Hits_Auth, Hits_Hub[, WDegree].
std::vector<std::string> statistic_names(bool weighted_degree = false);

std::string column_name(std::string_view statistic, std::string_view network);

// One row per (entity, period) present in each snapshot; static networks
// produce kStaticPeriod rows. `periods` restricts temporal networks.
FeatureFrame node_stats_frame(const TemporalNetwork& net,
                              const NodeStatsOptions& options = {},
                              const std::optional<std::vector<Period>>& periods = std::nullopt);

}  // namespace graphscore::netstats
