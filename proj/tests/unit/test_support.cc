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

#include "test_support.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "graphscore/random.h"

namespace graphscore::testing {

std::string node_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "n" + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

Graph make_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_id(i));
  for (auto [u, v] : edges) b.add_edge(node_id(u), node_id(v));
  return std::move(b).build();
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed, bool weighted) {
  Rng rng(seed);
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_id(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p)
        b.add_edge(node_id(i), node_id(j), weighted ? 0.5 + 1.5 * uniform01(rng) : 1.0);
  return std::move(b).build();
}

Graph relabeled(const Graph& g, std::uint64_t seed) {
  std::vector<NodeIndex> order(g.num_nodes());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  GraphBuilder b;
  for (NodeIndex v : order) b.add_node(g.id(v));
  std::vector<Graph::Edge> edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  for (const auto& e : edges) b.add_edge(g.id(e.u), g.id(e.v), e.weight);
  return std::move(b).build();
}

TempDir::TempDir() {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("graphscore_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace graphscore::testing
