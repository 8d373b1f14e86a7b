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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "graphscore/common.h"

namespace graphscore {

// Undirected weighted graph over contiguous node indices 0..N-1.
//
// Each node carries an external entity identifier. Neighbor lists are ordered
// by external identifier so neighborhood sums do not depend on the order in
// which nodes were indexed.
class Graph {
 public:
  struct Edge {
    NodeIndex u = 0;
    NodeIndex v = 0;
    double weight = 1.0;
    // Orientation seen at ingestion: bit 0 for u->v, bit 1 for v->u.
    std::uint8_t orientation = 3;
  };

  struct Neighbor {
    NodeIndex node = 0;
    double weight = 1.0;
    EdgeIndex edge = 0;
  };

  Graph() = default;

  std::size_t num_nodes() const { return ids_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::string& id(NodeIndex v) const { return ids_[v]; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<NodeIndex> find(std::string_view id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(NodeIndex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }
  double weighted_degree(NodeIndex v) const { return weighted_degree_[v]; }

  // True when u and v share an edge.
  bool adjacent(NodeIndex u, NodeIndex v) const;

  // Edges dropped at construction because both endpoints were equal.
  std::size_t dropped_self_loops() const { return dropped_self_loops_; }

 private:
  friend class GraphBuilder;

  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  // Per node, neighbor indices sorted ascending (for adjacency tests).
  std::vector<NodeIndex> sorted_neighbors_;
  std::vector<double> weighted_degree_;
  std::size_t dropped_self_loops_ = 0;
};

// Accumulates nodes and edges; duplicate edges sum their weights and
// self-loops are dropped and counted.
class GraphBuilder {
 public:
  NodeIndex add_node(std::string_view id);
  // Returns false when the edge was a self-loop and got dropped.
  bool add_edge(std::string_view u, std::string_view v, double weight = 1.0);
  bool add_edge(NodeIndex u, NodeIndex v, double weight = 1.0);

  std::size_t num_nodes() const { return ids_.size(); }
  Graph build() &&;

 private:
  struct PairHash {
    std::size_t operator()(std::uint64_t k) const noexcept {
      return std::hash<std::uint64_t>{}(k * 0x9e3779b97f4a7c15ULL);
    }
  };

  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_map<std::uint64_t, std::size_t, PairHash> edge_slot_;
  std::vector<Graph::Edge> edges_;
  std::size_t self_loops_ = 0;
};

// Snapshots of one network over ordered periods. A static network is a
// temporal network with a single snapshot labelled kStaticPeriod.
struct TemporalNetwork {
  std::string name;
  std::vector<Period> periods;
  std::vector<Graph> snapshots;
  // Union of entity identifiers across snapshots, in first-seen order.
  std::vector<std::string> entity_ids;
  bool directed_hint = false;

  bool is_static() const {
    return snapshots.size() == 1 && periods.front() == kStaticPeriod;
  }
  // Snapshot for a period; a static network answers for every period.
  const Graph* snapshot(Period p) const;
};

struct EdgeListStats {
  std::size_t rows = 0;
  std::size_t self_loops = 0;
  std::size_t merged_duplicates = 0;
};

// Reads `src,dst[,weight][,period]`. Missing weights default to 1 and missing
// periods to the static snapshot.
TemporalNetwork load_edge_list(const std::string& path, bool directed_hint = false,
                               EdgeListStats* stats = nullptr);

void write_edge_list(const TemporalNetwork& net, const std::string& path);

// Node attributes per (entity, period), e.g. ATT01..ATT13 and Bench_Score.
class NodeAttributeTable {
 public:
  NodeAttributeTable() = default;
  explicit NodeAttributeTable(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> attribute_index(std::string_view name) const;

  // Adds a row; throws on a duplicate (entity, period) key or a benchmark
  // score outside [0, 1].
  void add_row(const RowKey& key, std::span<const double> values);

  std::size_t num_rows() const { return keys_.size(); }
  const RowKey& key(std::size_t row) const { return keys_[row]; }
  std::optional<std::size_t> find(const std::string& entity, Period p) const;
  double value(std::size_t row, std::size_t attribute) const {
    return values_[row * names_.size() + attribute];
  }
  // NaN when the row or the value is absent.
  double lookup(const std::string& entity, Period p, std::size_t attribute) const;

 private:
  std::vector<std::string> names_;
  std::vector<RowKey> keys_;
  std::vector<double> values_;
  std::unordered_map<RowKey, std::size_t, RowKeyHash> index_;
  std::optional<std::size_t> bench_column_;
};

NodeAttributeTable load_node_attributes(const std::string& path);
void write_node_attributes(const NodeAttributeTable& table, const std::string& path);

// Symmetric D^{-1/2} A D^{-1/2} in CSR form aligned with Graph::neighbors.
// Rows of isolated nodes are empty.
struct NormalizedAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<NodeIndex> columns;
  std::vector<double> values;

  std::size_t size() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

NormalizedAdjacency normalized_adjacency(const Graph& g);

// Radius-1 neighborhood of v excluding v.
std::span<const Graph::Neighbor> ego_network(const Graph& g, NodeIndex v);

}  // namespace graphscore
