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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphscore/feature_frame.h"
#include "graphscore/graph.h"

namespace graphscore::egofeat {

enum class EdgeSubset : std::uint8_t { Full, NotBridge, IsBridge };
enum class Aggregation : std::uint8_t { Mean, Std };

std::string_view to_string(EdgeSubset s);
std::string_view to_string(Aggregation a);

// One aggregated column. Attribute and weight names resolve against the node
// attribute table first, then against the NodeStats frame either verbatim or
// as a short statistic name ("PageRank" -> NodeStats_PageRank_<Network>).
struct EgoAggregationSpec {
  std::string attribute;
  EdgeSubset subset = EdgeSubset::Full;
  Aggregation aggregation = Aggregation::Mean;
  std::optional<std::string> weight_by;
};

// <Network>Ego<Edges>_NET_<AGG>_<ATT>[_Wby_<Weight>]
std::string feature_name(std::string_view network, const EgoAggregationSpec& spec);
// <Network>Ego<Edges>_NET_HAS_NEIGHBORS
std::string has_neighbors_name(std::string_view network, EdgeSubset subset);

// Cross product subsets x {unweighted, weights...} x {MEAN, STD} x attributes,
// in that nesting order.
std::vector<EgoAggregationSpec> default_spec_grid(
    const std::vector<std::string>& attributes,
    const std::vector<std::string>& weights = {});

struct EgoOptions {
  // Rows to compute. Empty means every row of the attribute table. Keys whose
  // entity is not in the period's snapshot are skipped.
  std::vector<RowKey> keys;
  unsigned jobs = 1;
};

// Group D frame: one column per spec plus one has-neighbors indicator per
// subset in use. Neighbors with a missing value (or missing weight) are
// skipped; an empty effective neighborhood yields a missing value. SD is the
// population (weighted) SD.
FeatureFrame egonet_features(const TemporalNetwork& net, const NodeAttributeTable& attrs,
                             const FeatureFrame& stats,
                             const std::vector<EgoAggregationSpec>& specs,
                             const EgoOptions& options = {});

}  // namespace graphscore::egofeat
