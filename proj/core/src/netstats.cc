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

#include "graphscore/netstats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace graphscore::netstats {

PageRankResult pagerank(const Graph& g, const PageRankOptions& options) {
  PageRankResult out;
  const std::size_t n = g.num_nodes();
  if (n == 0) return out;
  const double d = options.damping;
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, uniform), next(n);
  std::vector<double> out_mass(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v)
    out_mass[v] = options.weighted ? g.weighted_degree(v) : static_cast<double>(g.degree(v));

  for (out.iterations = 1; out.iterations <= options.max_iter; ++out.iterations) {
    double dangling = 0.0;
    for (NodeIndex v = 0; v < n; ++v)
      if (out_mass[v] == 0.0) dangling += rank[v];
    const double base = (1.0 - d) * uniform + d * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (NodeIndex u = 0; u < n; ++u) {
      if (out_mass[u] == 0.0) continue;
      const double share = d * rank[u] / out_mass[u];
      for (const auto& nb : g.neighbors(u))
        next[nb.node] += share * (options.weighted ? nb.weight : 1.0);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - rank[i]);
    rank.swap(next);
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, options.max_iter);
  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (auto& r : rank) r /= total;
  out.scores = std::move(rank);
  return out;
}

namespace {

bool normalize_l2(std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  if (s == 0.0) return false;
  const double inv = 1.0 / std::sqrt(s);
  for (auto& v : x) v *= inv;
  return true;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

HitsResult hits_symmetric(const Graph& g, const HitsOptions& options) {
  HitsResult out;
  const std::size_t n = g.num_nodes();
  std::vector<double> x(n), next(n);
  for (NodeIndex v = 0; v < n; ++v) x[v] = g.degree(v) > 0 ? 1.0 : 0.0;
  if (!normalize_l2(x)) {
    out.authority = x;
    out.hub = x;
    out.converged = true;
    return out;
  }
  for (out.iterations = 1; out.iterations <= options.max_iter; ++out.iterations) {
    for (NodeIndex v = 0; v < n; ++v) {
      double s = x[v];
      for (const auto& nb : g.neighbors(v)) s += nb.weight * x[nb.node];
      next[v] = g.degree(v) > 0 ? s : 0.0;
    }
    normalize_l2(next);
    const double change = l1_distance(next, x);
    x.swap(next);
    if (change < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, options.max_iter);
  out.authority = x;
  out.hub = std::move(x);
  return out;
}

HitsResult hits_directed(const Graph& g, const HitsOptions& options) {
  HitsResult out;
  const std::size_t n = g.num_nodes();
  std::vector<double> hub(n, 1.0), auth(n, 0.0), prev_hub(n), prev_auth(n);
  normalize_l2(hub);
  for (out.iterations = 1; out.iterations <= options.max_iter; ++out.iterations) {
    prev_hub = hub;
    prev_auth = auth;
    std::fill(auth.begin(), auth.end(), 0.0);
    for (const auto& e : g.edges()) {
      if (e.orientation & 1) auth[e.v] += e.weight * hub[e.u];
      if (e.orientation & 2) auth[e.u] += e.weight * hub[e.v];
    }
    normalize_l2(auth);
    std::fill(hub.begin(), hub.end(), 0.0);
    for (const auto& e : g.edges()) {
      if (e.orientation & 1) hub[e.u] += e.weight * auth[e.v];
      if (e.orientation & 2) hub[e.v] += e.weight * auth[e.u];
    }
    normalize_l2(hub);
    if (l1_distance(hub, prev_hub) + l1_distance(auth, prev_auth) < options.tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = std::min(out.iterations, options.max_iter);
  out.authority = std::move(auth);
  out.hub = std::move(hub);
  return out;
}

}  // namespace

HitsResult hits(const Graph& g, const HitsOptions& options) {
  return options.directed ? hits_directed(g, options) : hits_symmetric(g, options);
}

std::vector<std::uint64_t> triads(const Graph& g) {
  const std::size_t n = g.num_nodes();
  // Forward adjacency: neighbors with a larger index, sorted.
  std::vector<std::vector<NodeIndex>> higher(n);
  for (NodeIndex v = 0; v < n; ++v) {
    for (const auto& nb : g.neighbors(v))
      if (nb.node > v) higher[v].push_back(nb.node);
    std::sort(higher[v].begin(), higher[v].end());
  }
  std::vector<std::uint64_t> count(n, 0);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v : higher[u]) {
      const auto& a = higher[u];
      const auto& b = higher[v];
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
          ++i;
        } else if (b[j] < a[i]) {
          ++j;
        } else {
          ++count[u];
          ++count[v];
          ++count[a[i]];
          ++i;
          ++j;
        }
      }
    }
  }
  return count;
}

namespace {

struct LowLink {
  std::vector<std::uint8_t> articulation;
  std::vector<std::uint8_t> bridge;
};

// Iterative Tarjan low-link over all components.
LowLink low_link(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::uint32_t kUnvisited = 0;
  std::vector<std::uint32_t> disc(n, kUnvisited), low(n, 0);
  LowLink out{std::vector<std::uint8_t>(n, 0),
              std::vector<std::uint8_t>(g.num_edges(), 0)};
  struct Frame {
    NodeIndex node;
    EdgeIndex via;  // edge used to enter the node; ignored for roots
    std::size_t next;
  };
  std::vector<Frame> stack;
  std::uint32_t timer = 0;
  for (NodeIndex root = 0; root < n; ++root) {
    if (disc[root] != kUnvisited) continue;
    disc[root] = low[root] = ++timer;
    std::size_t root_children = 0;
    stack.push_back({root, 0, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto nbrs = g.neighbors(f.node);
      if (f.next < nbrs.size()) {
        const auto& nb = nbrs[f.next++];
        if (stack.size() > 1 && nb.edge == f.via) continue;
        if (disc[nb.node] == kUnvisited) {
          disc[nb.node] = low[nb.node] = ++timer;
          if (f.node == root) ++root_children;
          stack.push_back({nb.node, nb.edge, 0});
        } else {
          low[f.node] = std::min(low[f.node], disc[nb.node]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      const NodeIndex parent = stack.back().node;
      low[parent] = std::min(low[parent], low[done.node]);
      if (low[done.node] > disc[parent]) out.bridge[done.via] = 1;
      if (parent != root && low[done.node] >= disc[parent]) out.articulation[parent] = 1;
    }
    if (root_children >= 2) out.articulation[root] = 1;
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> articulation_points(const Graph& g) {
  return low_link(g).articulation;
}

std::vector<std::uint8_t> bridges(const Graph& g) { return low_link(g).bridge; }

std::vector<std::string> statistic_names(bool weighted_degree) {
  std::vector<std::string> names{"Degree",   "DegreeCentr", "Triads",  "PageRank",
                                 "ArtPoint", "Hits_Auth",   "Hits_Hub"};
  if (weighted_degree) names.push_back("WDegree");
  return names;
}

std::string column_name(std::string_view statistic, std::string_view network) {
  return "NodeStats_" + std::string(statistic) + "_" + std::string(network);
}

FeatureFrame node_stats_frame(const TemporalNetwork& net, const NodeStatsOptions& options,
                              const std::optional<std::vector<Period>>& periods) {
  FeatureFrame frame;
  const auto names = statistic_names(options.weighted_degree);
  for (const auto& s : names) frame.add_column(column_name(s, net.name), FeatureGroup::C);

  for (std::size_t s = 0; s < net.snapshots.size(); ++s) {
    const Period p = net.periods[s];
    if (periods && !net.is_static() &&
        std::find(periods->begin(), periods->end(), p) == periods->end())
      continue;
    const Graph& g = net.snapshots[s];
    const std::size_t n = g.num_nodes();
    const auto pr = pagerank(g, options.pagerank);
    const auto h = hits(g, options.hits);
    const auto tri = triads(g);
    const auto art = articulation_points(g);
    for (NodeIndex v = 0; v < n; ++v) {
      const std::size_t row = frame.add_row({g.id(v), p});
      const double deg = static_cast<double>(g.degree(v));
      std::size_t c = 0;
      frame.set(row, c++, deg);
      frame.set(row, c++, n > 1 ? deg / static_cast<double>(n - 1) : 0.0);
      frame.set(row, c++, static_cast<double>(tri[v]));
      frame.set(row, c++, pr.scores[v]);
      frame.set(row, c++, art[v]);
      frame.set(row, c++, h.authority[v]);
      frame.set(row, c++, h.hub[v]);
      if (options.weighted_degree) frame.set(row, c++, g.weighted_degree(v));
    }
  }
  return frame;
}

}  // namespace graphscore::netstats
