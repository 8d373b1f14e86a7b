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
#include <utility>
#include <vector>

#include "graphscore/autodiff.h"
#include "graphscore/feature_frame.h"
#include "graphscore/graph.h"

namespace graphscore::gnn {

using ad::Matrix;

// First-order spectral filter: X theta0 - A_hat X theta1.
Matrix gcn_layer(const Matrix& x, const Graph& g, const Matrix& theta0, const Matrix& theta1);

struct GraphConvLayer {
  Matrix theta0;
  Matrix theta1;  // empty when tied
  Eigen::RowVectorXd bias;
};

// Stack of graph convolutions with ReLU between layers and a linear output.
// With tied weights each layer uses theta1 = -theta0, i.e. (I + A_hat) X theta.
struct GraphConvNet {
  std::vector<GraphConvLayer> layers;
  bool tied_theta = false;

  std::size_t num_parameters() const;
  // Order: per layer theta0, theta1 (untied only), bias; column-major.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);
};

// Glorot-uniform weights, zero biases. widths = {input, hidden..., output}.
GraphConvNet init_network(const std::vector<int>& widths, bool tied_theta, std::uint64_t seed);

Matrix forward(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x);

// Mean softmax cross-entropy over rows with label >= 0, plus
// 0.5 * weight_decay * sum of squared weights (biases excluded). When grad is
// given it receives the gradient in flatten() order.
double classification_loss(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x,
                           const std::vector<int>& labels, double weight_decay,
                           std::vector<double>* grad = nullptr);

// Mean binary cross-entropy of sigmoid(z_u . z_v) over pairs, plus the same
// weight penalty.
double reconstruction_loss(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x,
                           const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
                           const std::vector<double>& targets, double weight_decay,
                           std::vector<double>* grad = nullptr);

struct GnnConfig {
  int hidden = 16;
  int epochs = 200;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  bool tied_theta = false;
  int embedding_dim = 8;  // autoencoder bottleneck
  std::uint64_t seed = 1;

  void validate() const;
};

enum class ModelKind : std::uint8_t { Gcn, Gae };

// Frozen z-score statistics of the single input attribute.
struct Normalization {
  double mean = 0.0;
  double sd = 1.0;
};

struct GnnModel {
  ModelKind kind = ModelKind::Gcn;
  GraphConvNet net;
  GnnConfig config;
  std::vector<double> loss_history;
  // Provenance for application and checkpoints.
  std::string attribute;
  std::string model_id;  // e.g. "07" for ATT07
  std::string network;
  Period trained_period = kStaticPeriod;
  Normalization normalization;
};

inline constexpr int kNumClasses = 3;  // defaulter, non-defaulter, unbanked

// Full-batch Adam on the classification loss. Labels are class ids in
// [0, kNumClasses) or -1 for unlabeled nodes.
GnnModel train_gcn(const Graph& g, const Matrix& x, const std::vector<int>& labels,
                   const GnnConfig& cfg);

// Full-batch Adam on edge reconstruction: every edge against as many uniform
// non-edges, resampled each epoch.
GnnModel train_gae(const Graph& g, const Matrix& x, const GnnConfig& cfg);

// Class posteriors (GCN, rows sum to 1) or bottleneck embeddings (GAE).
Matrix apply_model(const GnnModel& model, const Graph& g, const Matrix& x);

// Input matrix for one attribute at one period: column 0 is the z-scored
// value (0 when missing), column 1 flags a missing value. Rows follow g.
Matrix node_inputs(const Graph& g, Period p, const NodeAttributeTable& attrs,
                   std::size_t attribute, const Normalization& norm);
// Mean and population SD over the nodes of g with a value at p.
Normalization fit_normalization(const Graph& g, Period p, const NodeAttributeTable& attrs,
                                std::size_t attribute);

struct ModelSpec {
  std::string attribute;
  std::string id;
};

// The first k attributes; ids are the digits of ATTnn names, else 1-based
// positions.
std::vector<ModelSpec> gnn_model_grid(const std::vector<std::string>& attribute_names,
                                      std::size_t k = 8);

// CHEB<id>_EMB_<k>_<Network> or GAE<id>_EMB_<k>_<Network>.
std::string column_name(const GnnModel& model, int k);

// Applies a frozen model to every requested period's snapshot (all periods
// when not given). Static networks still produce one row per requested period
// because the inputs change over time. Columns carry fitted_through =
// model.trained_period and read 0 for absent entities.
FeatureFrame model_frame(const GnnModel& model, const TemporalNetwork& net,
                         const NodeAttributeTable& attrs, const std::vector<Period>& periods,
                         unsigned jobs = 1);

// JSON checkpoint (format "graphscore-gnn", version 1).
void save_model(const GnnModel& model, const std::string& path);
GnnModel load_model(const std::string& path);

}  // namespace graphscore::gnn
