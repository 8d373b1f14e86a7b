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


#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "graphscore/explain.h"
#include "graphscore/gbm.h"
#include "graphscore/gnn.h"
#include "graphscore/graph.h"
#include "graphscore/metrics.h"
#include "graphscore/netstats.h"
#include "graphscore/node2vec.h"

namespace {

using namespace graphscore;

// Sparse random graph with mean degree about 6.
Graph sparse_graph(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node("n" + std::to_string(i));
  for (std::size_t e = 0; e < 3 * n; ++e) b.add_edge(pick(rng), pick(rng));
  return std::move(b).build();
}

struct Table {
  pipeline::DesignMatrix m;
  std::vector<int> y;
};

Table synthetic_table(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Table t;
  t.m.rows = rows;
  for (std::size_t c = 0; c < cols; ++c) {
    t.m.names.push_back("x" + std::to_string(c));
    t.m.groups.push_back(FeatureGroup::A);
  }
  t.m.values.resize(rows * cols);
  for (double& v : t.m.values) v = z(rng);
  std::bernoulli_distribution flip(0.1);
  for (std::size_t r = 0; r < rows; ++r) {
    const double logit = t.m.at(r, 0) + 0.5 * t.m.at(r, 1) * t.m.at(r, 2) - 2.0;
    t.y.push_back(1.0 / (1.0 + std::exp(-logit)) > 0.5 || flip(rng) ? 1 : 0);
  }
  return t;
}

void BM_PageRank(benchmark::State& state) {
  const Graph g = sparse_graph(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::pagerank(g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PageRank)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Triads(benchmark::State& state) {
  const Graph g = sparse_graph(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(netstats::triads(g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Triads)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BiasedWalks(benchmark::State& state) {
  const Graph g = sparse_graph(static_cast<std::size_t>(state.range(0)), 3);
  n2v::N2VConfig cfg;
  cfg.walks_per_node = 4;
  cfg.walk_length = 20;
  cfg.p = 0.5;
  cfg.q = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(n2v::biased_walks(g, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.walks_per_node);
}
BENCHMARK(BM_BiasedWalks)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GcnTraining(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Graph g = sparse_graph(n, 4);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  gnn::Matrix x(static_cast<Eigen::Index>(n), 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % gnn::kNumClasses);
  gnn::GnnConfig cfg;
  cfg.epochs = 20;
  for (auto _ : state) benchmark::DoNotOptimize(gnn::train_gcn(g, x, labels, cfg));
}
BENCHMARK(BM_GcnTraining)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GbmTrain(benchmark::State& state) {
  const Table t = synthetic_table(static_cast<std::size_t>(state.range(0)), 50, 5);
  gbm::GbmParams p;
  p.n_trees = 100;
  p.max_depth = 3;
  for (auto _ : state) benchmark::DoNotOptimize(gbm::train(t.m, t.y, p));
}
BENCHMARK(BM_GbmTrain)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_TreeShap(benchmark::State& state) {
  const Table t = synthetic_table(2000, 50, 6);
  gbm::GbmParams p;
  p.n_trees = 100;
  p.max_depth = static_cast<int>(state.range(0));
  p.min_leaf = 5;
  const auto model = gbm::train(t.m, t.y, p);
  std::vector<double> row(t.m.cols());
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = t.m.at(0, c);
  for (auto _ : state) benchmark::DoNotOptimize(explain::tree_shap(model, row));
}
BENCHMARK(BM_TreeShap)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_Auc(benchmark::State& state) {
  const Table t = synthetic_table(static_cast<std::size_t>(state.range(0)), 1, 7);
  const auto scores = t.m.column(0);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::auc(scores, t.y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
