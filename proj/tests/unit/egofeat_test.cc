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

#include "graphscore/egofeat.h"

#include <cmath>

#include <gtest/gtest.h>

#include "graphscore/netstats.h"
#include "graphscore/random.h"
#include "test_support.h"

namespace graphscore::egofeat {
namespace {

using graphscore::testing::make_graph;
using graphscore::testing::node_id;
using graphscore::testing::random_graph;

TemporalNetwork static_net(Graph g, std::string name = "EOWNET") {
  TemporalNetwork net;
  net.name = std::move(name);
  net.periods = {kStaticPeriod};
  net.entity_ids = g.ids();
  net.snapshots.push_back(std::move(g));
  return net;
}

NodeAttributeTable bench_table(const std::vector<std::pair<std::string, double>>& rows,
                               Period p = 1) {
  NodeAttributeTable t({"Bench_Score"});
  for (const auto& [id, v] : rows) {
    const double x[] = {v};
    t.add_row({id, p}, x);
  }
  return t;
}

double value(const FeatureFrame& f, const std::string& col, const std::string& entity,
             Period p = 1) {
  const auto row = f.find(entity, p);
  if (!row) return kMissing;
  return f.at(*row, *f.column_index(col));
}

TEST(EgoFeatures, MeanOfTwoNeighbors) {
  const auto net = static_net(make_graph(3, {{0, 1}, {0, 2}}));
  const auto attrs = bench_table({{node_id(0), 0.5}, {node_id(1), 0.2}, {node_id(2), 0.4}});
  const EgoAggregationSpec spec{"Bench_Score", EdgeSubset::Full, Aggregation::Mean, {}};
  const auto f = egonet_features(net, attrs, FeatureFrame{}, {spec});
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(0)), 0.3, 1e-15);
}

TEST(EgoFeatures, NonBridgeNeighborhoodOfCompany) {
  // Company in a triangle with two people, plus a pendant (bridge) link.
  GraphBuilder b;
  b.add_edge("C1", "P1");
  b.add_edge("C1", "P2");
  b.add_edge("P1", "P2");
  b.add_edge("C1", "P3");
  const auto net = static_net(std::move(b).build());
  const auto attrs =
      bench_table({{"C1", 0.5}, {"P1", 0.9}, {"P2", 0.9}, {"P3", 0.1}});
  const auto specs = default_spec_grid({"Bench_Score"});
  const auto f = egonet_features(net, attrs, FeatureFrame{}, specs);
  EXPECT_NEAR(value(f, "EOWNETEgoNotBridge_NET_MEAN_Bench_Score", "C1"), 0.9, 1e-15);
  EXPECT_NEAR(value(f, "EOWNETEgoIsBridge_NET_MEAN_Bench_Score", "C1"), 0.1, 1e-15);
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", "C1"), 1.9 / 3, 1e-15);
  // P3 only has the bridge.
  EXPECT_TRUE(is_missing(value(f, "EOWNETEgoNotBridge_NET_MEAN_Bench_Score", "P3")));
  EXPECT_EQ(value(f, "EOWNETEgoNotBridge_NET_HAS_NEIGHBORS", "P3"), 0.0);
  EXPECT_EQ(value(f, "EOWNETEgoIsBridge_NET_HAS_NEIGHBORS", "P3"), 1.0);
}

TEST(EgoFeatures, PageRankWeightedMean) {
  // Star center 0 with neighbors 1..3; neighbor 3 also links to 4 so
  // PageRank differs across neighbors.
  const auto net = static_net(make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}}));
  const auto stats = netstats::node_stats_frame(net);
  const std::vector<double> x = {0.0, 0.2, 0.5, 0.8, 0.3};
  std::vector<std::pair<std::string, double>> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({node_id(i), x[i]});
  const auto attrs = bench_table(rows);

  const auto pr = netstats::pagerank(net.snapshots[0]).scores;
  const double sw = pr[1] + pr[2] + pr[3];
  const double mean = (pr[1] * x[1] + pr[2] * x[2] + pr[3] * x[3]) / sw;
  double var = 0;
  for (int i = 1; i <= 3; ++i) var += pr[i] * (x[i] - mean) * (x[i] - mean);
  var /= sw;

  const std::vector<EgoAggregationSpec> specs = {
      {"Bench_Score", EdgeSubset::Full, Aggregation::Mean, "PageRank"},
      {"Bench_Score", EdgeSubset::Full, Aggregation::Std, "PageRank"}};
  const auto f = egonet_features(net, attrs, stats, specs);
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score_Wby_PageRank", node_id(0)), mean,
              1e-14);
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_STD_Bench_Score_Wby_PageRank", node_id(0)),
              std::sqrt(var), 1e-14);
}

TEST(EgoFeatures, ConstantAttribute) {
  const Graph g = random_graph(50, 0.08, 3);
  std::vector<std::pair<std::string, double>> rows;
  for (std::size_t i = 0; i < 50; ++i) rows.push_back({node_id(i), 0.42});
  const auto net = static_net(g);
  const auto f = egonet_features(net, bench_table(rows), FeatureFrame{},
                                 default_spec_grid({"Bench_Score"}));
  for (std::size_t i = 0; i < 50; ++i) {
    if (g.degree(i) == 0) continue;
    EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(i)), 0.42, 1e-15);
    EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_STD_Bench_Score", node_id(i)), 0.0, 1e-15);
  }
}

TEST(EgoFeatures, FullRecomposesFromBridgeSplit) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = random_graph(80, 0.03, seed);
    Rng rng(seed);
    std::vector<std::pair<std::string, double>> rows;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) rows.push_back({node_id(i), uniform01(rng)});
    const auto net = static_net(g);
    const auto f = egonet_features(net, bench_table(rows), FeatureFrame{},
                                   default_spec_grid({"Bench_Score"}));
    const auto br = netstats::bridges(g);
    for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
      if (g.degree(v) == 0) continue;
      double n_b = 0, n_nb = 0;
      for (const auto& nb : g.neighbors(v)) (br[nb.edge] ? n_b : n_nb) += 1;
      auto get = [&](const char* subset, const char* agg) {
        const double x = value(
            f, std::string("EOWNETEgo") + subset + "_NET_" + agg + "_Bench_Score", node_id(v));
        return is_missing(x) ? 0.0 : x;
      };
      const double m_full = get("Full", "MEAN");
      const double m_b = get("IsBridge", "MEAN"), m_nb = get("NotBridge", "MEAN");
      EXPECT_NEAR(m_full * (n_b + n_nb), m_b * n_b + m_nb * n_nb, 1e-12);
      // Second moments recompose the same way.
      const double s_full = get("Full", "STD"), s_b = get("IsBridge", "STD"),
                   s_nb = get("NotBridge", "STD");
      EXPECT_NEAR((s_full * s_full + m_full * m_full) * (n_b + n_nb),
                  (s_b * s_b + m_b * m_b) * n_b + (s_nb * s_nb + m_nb * m_nb) * n_nb, 1e-12);
    }
  }
}

TEST(EgoFeatures, EqualWeightsMatchUnweighted) {
  const Graph g = random_graph(40, 0.1, 8);
  NodeAttributeTable attrs({"Bench_Score", "W"});
  Rng rng(8);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const double row[] = {uniform01(rng), 2.5};
    attrs.add_row({node_id(i), 1}, row);
  }
  const auto net = static_net(g);
  const auto f = egonet_features(net, attrs, FeatureFrame{},
                                 default_spec_grid({"Bench_Score"}, {"W"}));
  for (NodeIndex v = 0; v < g.num_nodes(); ++v)
    for (const char* subset : {"Full", "NotBridge", "IsBridge"})
      for (const char* agg : {"MEAN", "STD"}) {
        const std::string base = std::string("EOWNETEgo") + subset + "_NET_" + agg + "_Bench_Score";
        const double a = value(f, base, node_id(v)), b = value(f, base + "_Wby_W", node_id(v));
        if (is_missing(a)) {
          EXPECT_TRUE(is_missing(b));
        } else {
          EXPECT_NEAR(a, b, 1e-12);
        }
      }
}

TEST(EgoFeatures, SingleNeighborHasZeroSd) {
  const auto net = static_net(make_graph(2, {{0, 1}}));
  const auto attrs = bench_table({{node_id(0), 0.1}, {node_id(1), 0.7}});
  const auto f = egonet_features(net, attrs, FeatureFrame{},
                                 {{"Bench_Score", EdgeSubset::Full, Aggregation::Std, {}}});
  EXPECT_EQ(value(f, "EOWNETEgoFull_NET_STD_Bench_Score", node_id(0)), 0.0);
}

TEST(EgoFeatures, IsolatedNodeIsMissingWithIndicator) {
  const auto net = static_net(make_graph(3, {{0, 1}}));
  const auto attrs = bench_table({{node_id(0), 0.1}, {node_id(1), 0.7}, {node_id(2), 0.3}});
  const auto f = egonet_features(net, attrs, FeatureFrame{}, default_spec_grid({"Bench_Score"}));
  EXPECT_TRUE(is_missing(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(2))));
  EXPECT_EQ(value(f, "EOWNETEgoFull_NET_HAS_NEIGHBORS", node_id(2)), 0.0);
  EXPECT_EQ(value(f, "EOWNETEgoFull_NET_HAS_NEIGHBORS", node_id(0)), 1.0);
}

TEST(EgoFeatures, MissingNeighborValuesAreSkipped) {
  const auto net = static_net(make_graph(3, {{0, 1}, {0, 2}}));
  const auto attrs = bench_table({{node_id(1), 0.6}});  // node 2 has no row
  const auto f = egonet_features(net, attrs, FeatureFrame{},
                                 {{"Bench_Score", EdgeSubset::Full, Aggregation::Mean, {}}},
                                 {{{node_id(0), 1}}, 1});
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(0)), 0.6, 1e-15);
}

TEST(EgoFeatures, UnknownAttributeIsConfigError) {
  const auto net = static_net(make_graph(2, {{0, 1}}));
  const auto attrs = bench_table({{node_id(0), 0.1}});
  EXPECT_THROW(egonet_features(net, attrs, FeatureFrame{},
                               {{"ATT99", EdgeSubset::Full, Aggregation::Mean, {}}}),
               ConfigError);
}

TEST(EgoFeatures, TemporalNetworkUsesEachPeriodsSnapshot) {
  TemporalNetwork net;
  net.name = "EOWNET";
  net.periods = {1, 2};
  net.snapshots.push_back(make_graph(2, {{0, 1}}));
  net.snapshots.push_back(make_graph(3, {{0, 2}}));
  NodeAttributeTable attrs({"Bench_Score"});
  for (Period p : {1, 2})
    for (int i = 0; i < 3; ++i) {
      const double x[] = {0.1 * (i + 1) + 0.01 * p};
      attrs.add_row({node_id(i), p}, x);
    }
  const auto f = egonet_features(net, attrs, FeatureFrame{},
                                 {{"Bench_Score", EdgeSubset::Full, Aggregation::Mean, {}}});
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(0), 1), 0.21, 1e-15);
  EXPECT_NEAR(value(f, "EOWNETEgoFull_NET_MEAN_Bench_Score", node_id(0), 2), 0.32, 1e-15);
  // node 2 is absent from period 1.
  EXPECT_FALSE(f.find_exact({node_id(2), 1}).has_value());
}

TEST(EgoFeatures, ParallelMatchesSerial) {
  const Graph g = random_graph(120, 0.04, 12);
  Rng rng(1);
  std::vector<std::pair<std::string, double>> rows;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) rows.push_back({node_id(i), uniform01(rng)});
  const auto net = static_net(g);
  const auto attrs = bench_table(rows);
  const auto specs = default_spec_grid({"Bench_Score"});
  const auto a = egonet_features(net, attrs, FeatureFrame{}, specs);
  const auto b = egonet_features(net, attrs, FeatureFrame{}, specs, {{}, 4});
  ASSERT_EQ(a.num_rows(), b.num_rows());
  for (std::size_t c = 0; c < a.num_columns(); ++c)
    for (std::size_t r = 0; r < a.num_rows(); ++r) {
      const double x = a.at(r, c), y = b.at(r, c);
      EXPECT_TRUE((is_missing(x) && is_missing(y)) || x == y);
    }
}

TEST(DefaultSpecGrid, CrossProductAndNames) {
  const auto grid = default_spec_grid({"ATT01", "Bench_Score"}, {"PageRank"});
  EXPECT_EQ(grid.size(), 3u * 2u * 2u * 2u);
  EXPECT_EQ(feature_name("FamilyNet", grid.front()), "FamilyNetEgoFull_NET_MEAN_ATT01");
  EXPECT_EQ(feature_name("EOWNET", grid.back()),
            "EOWNETEgoIsBridge_NET_STD_Bench_Score_Wby_PageRank");
}

}  // namespace
}  // namespace graphscore::egofeat
