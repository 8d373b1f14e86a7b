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

#include "graphscore/graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "graphscore/csv.h"

namespace graphscore {

std::optional<NodeIndex> Graph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Graph::adjacent(NodeIndex u, NodeIndex v) const {
  auto first = sorted_neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
  auto last = sorted_neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
  return std::binary_search(first, last, v);
}

NodeIndex GraphBuilder::add_node(std::string_view id) {
  auto [it, inserted] =
      index_.try_emplace(std::string(id), static_cast<NodeIndex>(ids_.size()));
  if (inserted) ids_.emplace_back(id);
  return it->second;
}

bool GraphBuilder::add_edge(std::string_view u, std::string_view v, double weight) {
  const NodeIndex a = add_node(u);
  const NodeIndex b = add_node(v);
  return add_edge(a, b, weight);
}

bool GraphBuilder::add_edge(NodeIndex u, NodeIndex v, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw ConfigError("edge weights must be finite and positive");
  if (u == v) {
    ++self_loops_;
    return false;
  }
  const NodeIndex lo = std::min(u, v), hi = std::max(u, v);
  const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
  auto [it, inserted] = edge_slot_.try_emplace(key, edges_.size());
  if (inserted) {
    edges_.push_back({u, v, weight, 1});
  } else {
    Graph::Edge& e = edges_[it->second];
    e.weight += weight;
    e.orientation |= (e.u == u) ? 1 : 2;
  }
  return true;
}

Graph GraphBuilder::build() && {
  Graph g;
  g.ids_ = std::move(ids_);
  g.index_ = std::move(index_);
  g.edges_ = std::move(edges_);
  g.dropped_self_loops_ = self_loops_;

  const std::size_t n = g.ids_.size();
  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::sort(order.begin(), order.end(),
            [&](NodeIndex a, NodeIndex b) { return g.ids_[a] < g.ids_[b]; });
  std::vector<NodeIndex> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<NodeIndex>(r);

  g.offsets_.assign(n + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeIndex k = 0; k < g.edges_.size(); ++k) {
    const auto& e = g.edges_[k];
    g.adjacency_[fill[e.u]++] = {e.v, e.weight, k};
    g.adjacency_[fill[e.v]++] = {e.u, e.weight, k};
  }
  g.weighted_degree_.assign(n, 0.0);
  g.sorted_neighbors_.resize(g.adjacency_.size());
  for (std::size_t v = 0; v < n; ++v) {
    auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last, [&](const Graph::Neighbor& a, const Graph::Neighbor& b) {
      return rank[a.node] < rank[b.node];
    });
    double wd = 0.0;
    for (auto it = first; it != last; ++it) {
      wd += it->weight;
      g.sorted_neighbors_[static_cast<std::size_t>(it - g.adjacency_.begin())] = it->node;
    }
    g.weighted_degree_[v] = wd;
    std::sort(g.sorted_neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.sorted_neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
  }
  return g;
}

const Graph* TemporalNetwork::snapshot(Period p) const {
  if (is_static()) return &snapshots.front();
  auto it = std::lower_bound(periods.begin(), periods.end(), p);
  if (it == periods.end() || *it != p) return nullptr;
  return &snapshots[static_cast<std::size_t>(it - periods.begin())];
}

TemporalNetwork load_edge_list(const std::string& path, bool directed_hint,
                               EdgeListStats* stats) {
  CsvReader reader(path);
  const std::size_t src = reader.require_column("src");
  const std::size_t dst = reader.require_column("dst");
  const auto weight_col = reader.column("weight");
  const auto period_col = reader.column("period");

  std::map<Period, GraphBuilder> builders;
  std::unordered_map<std::string, std::size_t> seen;
  TemporalNetwork net;
  net.directed_hint = directed_hint;
  EdgeListStats local;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    ++local.rows;
    if (f[src].empty() || f[dst].empty()) reader.fail("empty node identifier");
    double w = 1.0;
    if (weight_col && !f[*weight_col].empty()) {
      w = reader.parse_double(f[*weight_col], "weight");
      if (!(w > 0.0) || !std::isfinite(w)) reader.fail("weight must be positive");
    }
    Period p = kStaticPeriod;
    if (period_col && !f[*period_col].empty())
      p = reader.parse_int(f[*period_col], "period");
    for (auto id : {f[src], f[dst]}) {
      auto [it, inserted] = seen.try_emplace(std::string(id), net.entity_ids.size());
      if (inserted) net.entity_ids.emplace_back(id);
    }
    GraphBuilder& b = builders[p];
    if (!b.add_edge(f[src], f[dst], w)) ++local.self_loops;
  }
  if (local.rows == 0) throw EmptyInputError("'" + path + "' has no edges");
  for (auto& [p, b] : builders) {
    net.periods.push_back(p);
    net.snapshots.push_back(std::move(b).build());
  }
  std::size_t stored = 0;
  for (const auto& g : net.snapshots) stored += g.num_edges();
  local.merged_duplicates = local.rows - local.self_loops - stored;
  if (local.self_loops > 0)
    spdlog::warn("{}: dropped {} self-loop rows", path, local.self_loops);
  if (stats) *stats = local;
  return net;
}

void write_edge_list(const TemporalNetwork& net, const std::string& path) {
  CsvWriter out(path);
  out.row({"src", "dst", "weight", "period"});
  for (std::size_t s = 0; s < net.snapshots.size(); ++s) {
    const Graph& g = net.snapshots[s];
    const std::string period = std::to_string(net.periods[s]);
    for (const auto& e : g.edges())
      out.row({g.id(e.u), g.id(e.v), format_number(e.weight), period});
  }
  out.close();
}

NodeAttributeTable::NodeAttributeTable(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j])
        throw ConfigError("duplicate attribute name '" + names_[i] + "'");
    if (names_[i] == "Bench_Score") bench_column_ = i;
  }
}

std::optional<std::size_t> NodeAttributeTable::attribute_index(
    std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

void NodeAttributeTable::add_row(const RowKey& key, std::span<const double> values) {
  if (values.size() != names_.size())
    throw DimensionError("attribute row has wrong width");
  if (bench_column_) {
    const double b = values[*bench_column_];
    if (!is_missing(b) && (b < 0.0 || b > 1.0))
      throw ConfigError("Bench_Score outside [0,1] for entity " + key.entity);
  }
  auto [it, inserted] = index_.try_emplace(key, keys_.size());
  if (!inserted)
    throw ConfigError("duplicate attribute row for (" + key.entity + ", " +
                      std::to_string(key.period) + ")");
  keys_.push_back(key);
  values_.insert(values_.end(), values.begin(), values.end());
}

std::optional<std::size_t> NodeAttributeTable::find(const std::string& entity,
                                                    Period p) const {
  auto it = index_.find(RowKey{entity, p});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double NodeAttributeTable::lookup(const std::string& entity, Period p,
                                  std::size_t attribute) const {
  auto row = find(entity, p);
  return row ? value(*row, attribute) : kMissing;
}

NodeAttributeTable load_node_attributes(const std::string& path) {
  CsvReader reader(path);
  const std::size_t ent = reader.require_column("entity");
  const std::size_t per = reader.require_column("period");
  std::vector<std::string> names;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < reader.header().size(); ++i) {
    if (i == ent || i == per) continue;
    names.push_back(reader.header()[i]);
    cols.push_back(i);
  }
  NodeAttributeTable table(names);
  std::vector<std::string_view> f;
  std::vector<double> values(cols.size());
  while (reader.next(f)) {
    for (std::size_t k = 0; k < cols.size(); ++k)
      values[k] = reader.parse_optional_double(f[cols[k]], names[k]);
    try {
      table.add_row({std::string(f[ent]), reader.parse_int(f[per], "period")}, values);
    } catch (const ConfigError& e) {
      reader.fail(e.what());
    }
  }
  if (table.num_rows() == 0) throw EmptyInputError("'" + path + "' has no rows");
  return table;
}

void write_node_attributes(const NodeAttributeTable& table, const std::string& path) {
  CsvWriter out(path);
  std::vector<std::string> header{"entity", "period"};
  header.insert(header.end(), table.names().begin(), table.names().end());
  out.row(header);
  std::vector<std::string> row;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    row.clear();
    row.push_back(table.key(r).entity);
    row.push_back(std::to_string(table.key(r).period));
    for (std::size_t a = 0; a < table.names().size(); ++a)
      row.push_back(format_number(table.value(r, a)));
    out.row(row);
  }
  out.close();
}

NormalizedAdjacency normalized_adjacency(const Graph& g) {
  NormalizedAdjacency out;
  const std::size_t n = g.num_nodes();
  out.offsets.assign(n + 1, 0);
  std::vector<double> inv_sqrt(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    const double d = g.weighted_degree(v);
    inv_sqrt[v] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  out.columns.reserve(2 * g.num_edges());
  out.values.reserve(2 * g.num_edges());
  for (NodeIndex v = 0; v < n; ++v) {
    for (const auto& nb : g.neighbors(v)) {
      out.columns.push_back(nb.node);
      out.values.push_back(nb.weight * inv_sqrt[v] * inv_sqrt[nb.node]);
    }
    out.offsets[v + 1] = out.columns.size();
  }
  return out;
}

std::span<const Graph::Neighbor> ego_network(const Graph& g, NodeIndex v) {
  if (v >= g.num_nodes())
    throw IndexError("node index " + std::to_string(v) + " out of range");
  return g.neighbors(v);
}

}  // namespace graphscore
