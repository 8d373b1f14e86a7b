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

#include "graphscore/gnn.h"

#include <cmath>

#include <gtest/gtest.h>

#include "graphscore/random.h"
#include "test_support.h"

namespace graphscore::gnn {
namespace {

using graphscore::testing::make_graph;
using graphscore::testing::node_id;
using graphscore::testing::random_graph;
using graphscore::testing::TempDir;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = 2 * uniform01(rng) - 1;
  return m;
}

Matrix dense_normalized(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = e.weight;
  Eigen::VectorXd d = a.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (d(i) > 0 && d(j) > 0) a(i, j) /= std::sqrt(d(i) * d(j));
  return a;
}

TEST(GcnLayer, SingleEdgeHandExample) {
  Matrix x(2, 1);
  x << 1, 0;
  const Matrix id = Matrix::Identity(1, 1);
  const Matrix out = gcn_layer(x, make_graph(2, {{0, 1}}), id, -id);
  EXPECT_EQ(out(0, 0), 1.0);
  EXPECT_EQ(out(1, 0), 1.0);
}

TEST(GcnLayer, EdgelessGraphIsLinear) {
  Rng rng(1);
  const Matrix x = random_matrix(4, 3, rng);
  const Matrix t0 = random_matrix(3, 2, rng), t1 = random_matrix(3, 2, rng);
  const Matrix expected = x * t0;
  EXPECT_EQ(gcn_layer(x, make_graph(4, {}), t0, t1), expected);
}

TEST(GcnLayer, MatchesDenseOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const std::size_t n = 20 + seed * 3;
    const Graph g = random_graph(n, 0.15, seed, seed % 2 == 0);
    const Matrix x = random_matrix(n, 4, rng);
    const Matrix t0 = random_matrix(4, 3, rng), t1 = random_matrix(4, 3, rng);
    const Matrix expected = x * t0 - dense_normalized(g) * x * t1;
    EXPECT_LT((gcn_layer(x, g, t0, t1) - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(GcnLayer, PermutationEquivariantExactly) {
  Rng rng(5);
  const Graph g = random_graph(30, 0.2, 5, true);
  const Graph h = graphscore::testing::relabeled(g, 9);
  const Matrix x = random_matrix(30, 3, rng);
  Matrix xh(30, 3);
  for (NodeIndex v = 0; v < 30; ++v) xh.row(*h.find(g.id(v))) = x.row(v);
  const Matrix t0 = random_matrix(3, 2, rng), t1 = random_matrix(3, 2, rng);
  const Matrix a = gcn_layer(x, g, t0, t1), b = gcn_layer(xh, h, t0, t1);
  for (NodeIndex v = 0; v < 30; ++v) {
    const NodeIndex w = *h.find(g.id(v));
    for (int k = 0; k < 2; ++k) EXPECT_EQ(a(v, k), b(w, k));
  }
}

TEST(GcnLayer, ShapeMismatch) {
  const Graph g = make_graph(3, {{0, 1}});
  EXPECT_THROW(gcn_layer(Matrix::Zero(2, 1), g, Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
               DimensionError);
  EXPECT_THROW(gcn_layer(Matrix::Zero(3, 2), g, Matrix::Ones(1, 1), Matrix::Ones(1, 1)),
               DimensionError);
}

double relative_gradient_error(const GraphConvNet& net,
                               const std::function<double(const GraphConvNet&,
                                                          std::vector<double>*)>& loss) {
  std::vector<double> grad;
  loss(net, &grad);
  const auto params = net.flatten();
  EXPECT_EQ(grad.size(), params.size());
  double num = 0, den = 0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < params.size(); ++i) {
    GraphConvNet plus = net, minus = net;
    auto pp = params, pm = params;
    pp[i] += h;
    pm[i] -= h;
    plus.unflatten(pp);
    minus.unflatten(pm);
    const double fd = (loss(plus, nullptr) - loss(minus, nullptr)) / (2 * h);
    num += (fd - grad[i]) * (fd - grad[i]);
    den += fd * fd;
  }
  return std::sqrt(num / den);
}

TEST(GcnTraining, GradientMatchesFiniteDifferences) {
  const Graph g = make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}});
  Rng rng(7);
  const Matrix x = random_matrix(6, 2, rng);
  const std::vector<int> labels = {0, 1, 2, -1, 1, 0};
  for (bool tied : {false, true}) {
    const GraphConvNet net = init_network({2, 4, 3}, tied, 11);
    const double err = relative_gradient_error(net, [&](const GraphConvNet& n, auto* grad) {
      return classification_loss(n, normalized_adjacency(g), x, labels, 5e-4, grad);
    });
    EXPECT_LT(err, 1e-4) << "tied=" << tied;
  }
}

TEST(GaeTraining, GradientMatchesFiniteDifferences) {
  const Graph g = make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 4}, {4, 5}});
  Rng rng(8);
  const Matrix x = random_matrix(6, 2, rng);
  const std::vector<std::pair<NodeIndex, NodeIndex>> pairs = {{0, 1}, {2, 3}, {4, 5},
                                                              {0, 5}, {1, 4}, {3, 0}};
  const std::vector<double> targets = {1, 1, 1, 0, 0, 0};
  const GraphConvNet net = init_network({2, 5, 4}, false, 12);
  const double err = relative_gradient_error(net, [&](const GraphConvNet& n, auto* grad) {
    return reconstruction_loss(n, normalized_adjacency(g), x, pairs, targets, 5e-4, grad);
  });
  EXPECT_LT(err, 1e-4);
}

Graph two_cliques(int size) {
  std::vector<std::pair<int, int>> e;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) e.push_back({c * size + i, c * size + j});
  return make_graph(2 * size, e);
}

TEST(GcnTraining, RegularComponentsAreIndistinguishableWithConstantFeatures) {
  // On a regular component the normalized operator maps the constant vector to
  // itself, so every layer sees the same rows in both cliques.
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) e.push_back({i, j});
  for (int i = 6; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) e.push_back({i, j});
  const Graph g = make_graph(16, e);
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) labels[i] = i < 6 ? 0 : 1;
  const Matrix x = Matrix::Ones(16, 1);
  const auto model = train_gcn(g, x, labels, GnnConfig{});
  const Matrix post = apply_model(model, g, x);
  for (int i = 1; i < 16; ++i)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(post(i, k), post(0, k), 1e-12);
}

TEST(GcnTraining, StructureSeparatesComponents) {
  // Star K_{1,7} labelled 0 and an 8-clique labelled 1, constant features.
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < 8; ++i) e.push_back({0, i});
  for (int i = 8; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) e.push_back({i, j});
  const Graph g = make_graph(16, e);
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) labels[i] = i < 8 ? 0 : 1;
  const Matrix x = Matrix::Ones(16, 1);
  const auto model = train_gcn(g, x, labels, GnnConfig{});
  const Matrix post = apply_model(model, g, x);
  int correct = 0;
  for (int i = 0; i < 16; ++i) {
    Eigen::Index arg;
    post.row(i).maxCoeff(&arg);
    correct += arg == labels[i];
  }
  EXPECT_GT(correct / 16.0, 0.95);
}

TEST(GcnTraining, LossDecreasesAndPosteriorsSumToOne) {
  const Graph g = random_graph(40, 0.1, 3);
  Rng rng(3);
  const Matrix x = random_matrix(40, 2, rng);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) labels[i] = i % 3;
  const auto model = train_gcn(g, x, labels, GnnConfig{});
  for (int e = 1; e <= 5; ++e) EXPECT_LT(model.loss_history[e], model.loss_history[e - 1]);
  const Matrix post = apply_model(model, g, x);
  for (Eigen::Index i = 0; i < post.rows(); ++i) EXPECT_NEAR(post.row(i).sum(), 1.0, 1e-9);
}

TEST(GcnTraining, SingleClassCollapses) {
  const Graph g = random_graph(20, 0.2, 4);
  const Matrix x = Matrix::Ones(20, 2);
  const auto model = train_gcn(g, x, std::vector<int>(20, 2), GnnConfig{});
  const Matrix post = apply_model(model, g, x);
  for (Eigen::Index i = 0; i < post.rows(); ++i) {
    Eigen::Index arg;
    post.row(i).maxCoeff(&arg);
    EXPECT_EQ(arg, 2);
  }
}

TEST(GcnTraining, BitReproducible) {
  const Graph g = random_graph(30, 0.1, 6);
  Rng rng(6);
  const Matrix x = random_matrix(30, 2, rng);
  std::vector<int> labels(30, 1);
  labels[0] = 0;
  GnnConfig cfg;
  cfg.epochs = 30;
  EXPECT_EQ(train_gcn(g, x, labels, cfg).net.flatten(), train_gcn(g, x, labels, cfg).net.flatten());
}

TEST(GaeTraining, EdgesScoreAboveNonEdges) {
  const Graph g = random_graph(20, 0.2, 10);
  Rng rng(10);
  const Matrix x = random_matrix(20, 2, rng);
  GnnConfig cfg;
  const auto model = train_gae(g, x, cfg);
  EXPECT_LT(model.loss_history.back(), model.loss_history.front());
  const Matrix z = apply_model(model, g, x);
  ASSERT_EQ(z.cols(), 8);
  auto score = [&](NodeIndex u, NodeIndex v) {
    return 1.0 / (1.0 + std::exp(-z.row(u).dot(z.row(v))));
  };
  double on = 0, off = 0;
  int n_on = 0, n_off = 0;
  for (NodeIndex u = 0; u < 20; ++u)
    for (NodeIndex v = u + 1; v < 20; ++v) {
      if (g.adjacent(u, v)) {
        on += score(u, v);
        ++n_on;
      } else {
        off += score(u, v);
        ++n_off;
      }
    }
  EXPECT_GT(on / n_on, off / n_off);
}

TEST(GaeTraining, ZeroEpochsReproducible) {
  const Graph g = two_cliques(4);
  const Matrix x = Matrix::Ones(8, 2);
  GnnConfig cfg;
  cfg.epochs = 0;
  EXPECT_EQ(apply_model(train_gae(g, x, cfg), g, x), apply_model(train_gae(g, x, cfg), g, x));
}

TEST(NodeInputs, ZScoreWithMissingFlag) {
  const Graph g = make_graph(3, {{0, 1}, {1, 2}});
  NodeAttributeTable attrs({"ATT01"});
  const double a[] = {1.0}, b[] = {3.0};
  attrs.add_row({node_id(0), 2}, a);
  attrs.add_row({node_id(1), 2}, b);
  const auto norm = fit_normalization(g, 2, attrs, 0);
  EXPECT_DOUBLE_EQ(norm.mean, 2.0);
  EXPECT_DOUBLE_EQ(norm.sd, 1.0);
  const Matrix x = node_inputs(g, 2, attrs, 0, norm);
  EXPECT_DOUBLE_EQ(x(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(x(1, 0), 1.0);
  EXPECT_EQ(x(2, 0), 0.0);
  EXPECT_EQ(x(2, 1), 1.0);
  EXPECT_EQ(x(0, 1), 0.0);
}

TEST(ModelGrid, FirstKWithAttributeIds) {
  const auto grid = gnn_model_grid({"ATT01", "ATT07", "Bench_Score", "ATT13"}, 3);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[1].id, "07");
  EXPECT_EQ(grid[2].id, "03");
}

TEST(ModelFrame, ColumnsAndPresence) {
  TemporalNetwork net;
  net.name = "EOWNET";
  net.periods = {1, 2};
  net.snapshots.push_back(make_graph(3, {{0, 1}, {1, 2}}));
  net.snapshots.push_back(make_graph(4, {{0, 1}, {2, 3}}));
  NodeAttributeTable attrs({"ATT07"});
  for (Period p : {1, 2})
    for (int i = 0; i < 4; ++i) {
      const double v[] = {static_cast<double>(i + p)};
      attrs.add_row({node_id(i), p}, v);
    }
  const Graph& g1 = net.snapshots[0];
  const auto norm = fit_normalization(g1, 1, attrs, 0);
  GnnConfig cfg;
  cfg.epochs = 5;
  auto model = train_gcn(g1, node_inputs(g1, 1, attrs, 0, norm), {0, 1, 2}, cfg);
  model.attribute = "ATT07";
  model.model_id = "07";
  model.network = "EOWNET";
  model.trained_period = 1;
  model.normalization = norm;
  const auto frame = model_frame(model, net, attrs, {2});
  EXPECT_EQ(frame.column(0).name, "CHEB07_EMB_01_EOWNET");
  EXPECT_EQ(frame.column(2).name, "CHEB07_EMB_03_EOWNET");
  EXPECT_EQ(frame.column(0).fitted_through, 1);
  EXPECT_EQ(frame.num_rows(), 4u);
  EXPECT_EQ(*frame.presence_indicator(), "NET_PRESENT_EOWNET");
}

TEST(Checkpoint, RoundTripIsExact) {
  TempDir dir;
  const Graph g = random_graph(15, 0.2, 2);
  Rng rng(2);
  const Matrix x = random_matrix(15, 2, rng);
  GnnConfig cfg;
  cfg.epochs = 10;
  auto model = train_gae(g, x, cfg);
  model.attribute = "ATT02";
  model.model_id = "02";
  model.network = "FamilyNet";
  model.normalization = {0.25, 1.5};
  save_model(model, dir.file("m.json"));
  const auto back = load_model(dir.file("m.json"));
  EXPECT_EQ(back.net.flatten(), model.net.flatten());
  EXPECT_EQ(back.kind, ModelKind::Gae);
  EXPECT_EQ(back.network, "FamilyNet");
  EXPECT_EQ(back.normalization.sd, 1.5);
  EXPECT_EQ(apply_model(back, g, x), apply_model(model, g, x));
  graphscore::testing::write_text(dir.file("bad.json"), "{\"format\":\"other\"}");
  EXPECT_THROW(load_model(dir.file("bad.json")), ConfigError);
}

}  // namespace
}  // namespace graphscore::gnn
