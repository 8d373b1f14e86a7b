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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "graphscore/parallel.h"
#include "graphscore/random.h"

namespace graphscore::gnn {

Matrix gcn_layer(const Matrix& x, const Graph& g, const Matrix& theta0, const Matrix& theta1) {
  if (x.rows() != static_cast<Eigen::Index>(g.num_nodes()))
    throw DimensionError(fmt::format("gcn_layer: {} feature rows for {} nodes", x.rows(),
                                     g.num_nodes()));
  if (theta0.rows() != x.cols() || theta1.rows() != x.cols() || theta0.cols() != theta1.cols())
    throw DimensionError("gcn_layer: weight shapes do not match the input");
  const NormalizedAdjacency a = normalized_adjacency(g);
  return x * theta0 - ad::multiply(a, x * theta1);
}

std::size_t GraphConvNet::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.theta0.size() + l.theta1.size() + l.bias.size();
  return n;
}

std::vector<double> GraphConvNet::flatten() const {
  std::vector<double> out;
  out.reserve(num_parameters());
  for (const auto& l : layers) {
    out.insert(out.end(), l.theta0.data(), l.theta0.data() + l.theta0.size());
    out.insert(out.end(), l.theta1.data(), l.theta1.data() + l.theta1.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void GraphConvNet::unflatten(const std::vector<double>& params) {
  if (params.size() != num_parameters())
    throw DimensionError(fmt::format("unflatten: {} values for {} parameters", params.size(),
                                     num_parameters()));
  const double* p = params.data();
  for (auto& l : layers) {
    std::copy_n(p, l.theta0.size(), l.theta0.data());
    p += l.theta0.size();
    std::copy_n(p, l.theta1.size(), l.theta1.data());
    p += l.theta1.size();
    std::copy_n(p, l.bias.size(), l.bias.data());
    p += l.bias.size();
  }
}

GraphConvNet init_network(const std::vector<int>& widths, bool tied_theta, std::uint64_t seed) {
  if (widths.size() < 2) throw ConfigError("graph network needs at least two widths");
  GraphConvNet net;
  net.tied_theta = tied_theta;
  Rng rng = make_rng(seed, {fnv1a("gnn-init")});
  auto glorot = [&](int in, int out) {
    const double limit = std::sqrt(6.0 / (in + out));
    Matrix m(in, out);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
    return m;
  };
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] < 1 || widths[l + 1] < 1) throw ConfigError("layer widths must be >= 1");
    GraphConvLayer layer;
    layer.theta0 = glorot(widths[l], widths[l + 1]);
    if (!tied_theta) layer.theta1 = glorot(widths[l], widths[l + 1]);
    layer.bias = Eigen::RowVectorXd::Zero(widths[l + 1]);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

struct Recorded {
  ad::Var output;
  std::vector<ad::Var> params;   // flatten() order
  std::vector<ad::Var> weights;  // penalized subset
};

Recorded record(ad::Tape& tape, const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x) {
  if (net.layers.empty()) throw ConfigError("graph network has no layers");
  if (x.rows() != static_cast<Eigen::Index>(a.size()))
    throw DimensionError(fmt::format("{} feature rows for {} nodes", x.rows(), a.size()));
  if (x.cols() != net.layers.front().theta0.rows())
    throw DimensionError(fmt::format("network expects {} input columns, got {}",
                                     net.layers.front().theta0.rows(), x.cols()));
  Recorded r;
  ad::Var h = tape.constant(x);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const ad::Var t0 = tape.parameter(layer.theta0);
    r.params.push_back(t0);
    r.weights.push_back(t0);
    ad::Var out;
    if (net.tied_theta) {
      const ad::Var xt = tape.matmul(h, t0);
      out = tape.add(xt, tape.propagate(a, xt));
    } else {
      const ad::Var t1 = tape.parameter(layer.theta1);
      r.params.push_back(t1);
      r.weights.push_back(t1);
      out = tape.sub(tape.matmul(h, t0), tape.propagate(a, tape.matmul(h, t1)));
    }
    const ad::Var b = tape.parameter(layer.bias);
    r.params.push_back(b);
    out = tape.add_row(out, b);
    h = l + 1 < net.layers.size() ? tape.relu(out) : out;
  }
  r.output = h;
  return r;
}

ad::Var with_penalty(ad::Tape& tape, ad::Var loss, const Recorded& r, double weight_decay) {
  if (weight_decay == 0.0) return loss;
  for (auto w : r.weights) loss = tape.add(loss, tape.scale(tape.half_squared_norm(w), weight_decay));
  return loss;
}

void collect(const ad::Tape& tape, const Recorded& r, std::vector<double>* grad) {
  grad->clear();
  for (auto p : r.params) {
    const Matrix& g = tape.grad(p);
    grad->insert(grad->end(), g.data(), g.data() + g.size());
  }
}

class Adam {
 public:
  Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double lr_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace

Matrix forward(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x) {
  ad::Tape tape;
  const auto r = record(tape, net, a, x);
  return tape.value(r.output);
}

double classification_loss(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x,
                           const std::vector<int>& labels, double weight_decay,
                           std::vector<double>* grad) {
  ad::Tape tape;
  const auto r = record(tape, net, a, x);
  const auto loss =
      with_penalty(tape, tape.softmax_cross_entropy(r.output, labels), r, weight_decay);
  if (grad) {
    tape.backward(loss);
    collect(tape, r, grad);
  }
  return tape.scalar(loss);
}

double reconstruction_loss(const GraphConvNet& net, const NormalizedAdjacency& a, const Matrix& x,
                           const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
                           const std::vector<double>& targets, double weight_decay,
                           std::vector<double>* grad) {
  ad::Tape tape;
  const auto r = record(tape, net, a, x);
  const auto loss =
      with_penalty(tape, tape.pair_logistic_loss(r.output, pairs, targets), r, weight_decay);
  if (grad) {
    tape.backward(loss);
    collect(tape, r, grad);
  }
  return tape.scalar(loss);
}

void GnnConfig::validate() const {
  if (hidden < 1 || embedding_dim < 1) throw ConfigError("gnn: widths must be >= 1");
  if (epochs < 0) throw ConfigError("gnn: epochs must be >= 0");
  if (!(learning_rate > 0)) throw ConfigError("gnn: learning_rate must be positive");
  if (weight_decay < 0) throw ConfigError("gnn: weight_decay must be >= 0");
}

GnnModel train_gcn(const Graph& g, const Matrix& x, const std::vector<int>& labels,
                   const GnnConfig& cfg) {
  cfg.validate();
  if (labels.size() != g.num_nodes())
    throw DimensionError(fmt::format("train_gcn: {} labels for {} nodes", labels.size(),
                                     g.num_nodes()));
  int present[kNumClasses] = {0, 0, 0};
  for (int y : labels) {
    if (y >= kNumClasses) throw IndexError(fmt::format("train_gcn: label {} out of range", y));
    if (y >= 0) ++present[y];
  }
  for (int c = 0; c < kNumClasses; ++c)
    if (present[c] == 0) spdlog::warn("train_gcn: class {} absent from training labels", c);

  GnnModel model;
  model.kind = ModelKind::Gcn;
  model.config = cfg;
  model.net = init_network({static_cast<int>(x.cols()), cfg.hidden, kNumClasses}, cfg.tied_theta,
                           cfg.seed);
  const NormalizedAdjacency a = normalized_adjacency(g);
  std::vector<double> params = model.net.flatten(), grad;
  Adam adam(params.size(), cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.loss_history.push_back(
        classification_loss(model.net, a, x, labels, cfg.weight_decay, &grad));
    adam.step(params, grad);
    model.net.unflatten(params);
  }
  return model;
}

GnnModel train_gae(const Graph& g, const Matrix& x, const GnnConfig& cfg) {
  cfg.validate();
  GnnModel model;
  model.kind = ModelKind::Gae;
  model.config = cfg;
  model.net = init_network({static_cast<int>(x.cols()), cfg.hidden, cfg.embedding_dim},
                           cfg.tied_theta, cfg.seed);
  const NormalizedAdjacency a = normalized_adjacency(g);
  const std::size_t n = g.num_nodes();
  const std::size_t m = g.num_edges();
  const double possible = 0.5 * static_cast<double>(n) * static_cast<double>(n - (n > 0));
  const bool can_sample = n > 1 && static_cast<double>(m) < possible;

  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  std::vector<double> targets;
  Rng rng = make_rng(cfg.seed, {fnv1a("gae-negatives")});
  std::vector<double> params = model.net.flatten(), grad;
  Adam adam(params.size(), cfg.learning_rate);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    pairs.clear();
    targets.clear();
    for (const auto& e : g.edges()) {
      pairs.emplace_back(e.u, e.v);
      targets.push_back(1.0);
    }
    for (std::size_t k = 0; can_sample && k < m; ++k) {
      for (;;) {
        const auto u = static_cast<NodeIndex>(uniform01(rng) * static_cast<double>(n));
        const auto v = static_cast<NodeIndex>(uniform01(rng) * static_cast<double>(n));
        if (u == v || g.adjacent(u, v)) continue;
        pairs.emplace_back(u, v);
        targets.push_back(0.0);
        break;
      }
    }
    if (pairs.empty()) break;
    model.loss_history.push_back(
        reconstruction_loss(model.net, a, x, pairs, targets, cfg.weight_decay, &grad));
    adam.step(params, grad);
    model.net.unflatten(params);
  }
  return model;
}

Matrix apply_model(const GnnModel& model, const Graph& g, const Matrix& x) {
  const NormalizedAdjacency a = normalized_adjacency(g);
  Matrix out = forward(model.net, a, x);
  if (model.kind == ModelKind::Gae) return out;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double mx = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - mx).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

namespace {

double attribute_value(const NodeAttributeTable& attrs, const std::string& entity, Period p,
                       std::size_t attribute) {
  auto row = attrs.find(entity, p);
  if (!row && p != kStaticPeriod) row = attrs.find(entity, kStaticPeriod);
  return row ? attrs.value(*row, attribute) : kMissing;
}

}  // namespace

Normalization fit_normalization(const Graph& g, Period p, const NodeAttributeTable& attrs,
                                std::size_t attribute) {
  double sum = 0, sum_sq = 0;
  std::size_t count = 0;
  for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
    const double x = attribute_value(attrs, g.id(v), p, attribute);
    if (is_missing(x)) continue;
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  Normalization n;
  if (count == 0) return n;
  n.mean = sum / static_cast<double>(count);
  const double var = std::max(0.0, sum_sq / static_cast<double>(count) - n.mean * n.mean);
  n.sd = var > 0 ? std::sqrt(var) : 1.0;
  return n;
}

Matrix node_inputs(const Graph& g, Period p, const NodeAttributeTable& attrs,
                   std::size_t attribute, const Normalization& norm) {
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(g.num_nodes()), 2);
  for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
    const double value = attribute_value(attrs, g.id(v), p, attribute);
    if (is_missing(value)) {
      x(v, 1) = 1.0;
    } else {
      x(v, 0) = (value - norm.mean) / norm.sd;
    }
  }
  return x;
}

std::vector<ModelSpec> gnn_model_grid(const std::vector<std::string>& attribute_names,
                                      std::size_t k) {
  std::vector<ModelSpec> out;
  for (std::size_t i = 0; i < attribute_names.size() && out.size() < k; ++i) {
    const auto& name = attribute_names[i];
    std::string digits;
    if (name.rfind("ATT", 0) == 0) {
      digits = name.substr(3);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                         [](unsigned char c) { return std::isdigit(c); }))
        digits.clear();
    }
    out.push_back({name, digits.empty() ? fmt::format("{:02d}", i + 1) : digits});
  }
  return out;
}

std::string column_name(const GnnModel& model, int k) {
  return fmt::format("{}{}_EMB_{:02d}_{}", model.kind == ModelKind::Gcn ? "CHEB" : "GAE",
                     model.model_id, k, model.network);
}

FeatureFrame model_frame(const GnnModel& model, const TemporalNetwork& net,
                         const NodeAttributeTable& attrs, const std::vector<Period>& periods,
                         unsigned jobs) {
  const auto attribute = attrs.attribute_index(model.attribute);
  if (!attribute) throw ConfigError(fmt::format("gnn: unknown attribute '{}'", model.attribute));
  const int width = model.kind == ModelKind::Gcn ? kNumClasses : model.config.embedding_dim;
  FeatureFrame frame;
  for (int k = 1; k <= width; ++k)
    frame.add_column(column_name(model, k), FeatureGroup::E, model.trained_period, 0.0);
  frame.set_presence_indicator(network_presence_column(net.name), FeatureGroup::E);

  std::vector<Period> todo = periods;
  if (todo.empty()) todo = net.periods;
  std::vector<Matrix> outputs(todo.size());
  parallel_for(todo.size(), jobs, [&](std::size_t i) {
    const Graph* g = net.snapshot(todo[i]);
    if (!g || g->empty()) return;
    outputs[i] = apply_model(model, *g, node_inputs(*g, todo[i], attrs, *attribute,
                                                    model.normalization));
  });
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const Graph* g = net.snapshot(todo[i]);
    if (!g || g->empty()) continue;
    for (NodeIndex v = 0; v < g->num_nodes(); ++v) {
      const std::size_t row = frame.add_row({g->id(v), todo[i]});
      for (int k = 0; k < width; ++k) frame.set(row, k, outputs[i](v, k));
    }
  }
  return frame;
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != m.rows())
    throw ConfigError("checkpoint: matrix row count mismatch");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (static_cast<Eigen::Index>(data[i].size()) != m.cols())
      throw ConfigError("checkpoint: matrix column count mismatch");
    for (Eigen::Index j2 = 0; j2 < m.cols(); ++j2) m(i, j2) = data[i][j2].get<double>();
  }
  return m;
}

}  // namespace

void save_model(const GnnModel& model, const std::string& path) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : model.net.layers)
    layers.push_back({{"theta0", matrix_json(l.theta0)},
                      {"theta1", matrix_json(l.theta1)},
                      {"bias", matrix_json(Matrix(l.bias))}});
  const auto& c = model.config;
  nlohmann::json j = {
      {"format", "graphscore-gnn"},
      {"version", 1},
      {"kind", model.kind == ModelKind::Gcn ? "gcn" : "gae"},
      {"attribute", model.attribute},
      {"model_id", model.model_id},
      {"network", model.network},
      {"trained_period", model.trained_period},
      {"normalization", {{"mean", model.normalization.mean}, {"sd", model.normalization.sd}}},
      {"config",
       {{"hidden", c.hidden},
        {"epochs", c.epochs},
        {"learning_rate", c.learning_rate},
        {"weight_decay", c.weight_decay},
        {"tied_theta", c.tied_theta},
        {"embedding_dim", c.embedding_dim},
        {"seed", c.seed}}},
      {"loss_history", model.loss_history},
      {"layers", std::move(layers)}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw Error("failed writing " + path);
}

GnnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  try {
    if (j.at("format") != "graphscore-gnn" || j.at("version") != 1)
      throw ConfigError(path + ": not a version-1 graphscore-gnn checkpoint");
    GnnModel m;
    m.kind = j.at("kind") == "gcn" ? ModelKind::Gcn : ModelKind::Gae;
    m.attribute = j.at("attribute");
    m.model_id = j.at("model_id");
    m.network = j.at("network");
    m.trained_period = j.at("trained_period");
    m.normalization.mean = j.at("normalization").at("mean");
    m.normalization.sd = j.at("normalization").at("sd");
    const auto& c = j.at("config");
    m.config.hidden = c.at("hidden");
    m.config.epochs = c.at("epochs");
    m.config.learning_rate = c.at("learning_rate");
    m.config.weight_decay = c.at("weight_decay");
    m.config.tied_theta = c.at("tied_theta");
    m.config.embedding_dim = c.at("embedding_dim");
    m.config.seed = c.at("seed");
    m.loss_history = j.at("loss_history").get<std::vector<double>>();
    m.net.tied_theta = m.config.tied_theta;
    for (const auto& l : j.at("layers")) {
      GraphConvLayer layer;
      layer.theta0 = matrix_from_json(l.at("theta0"));
      layer.theta1 = matrix_from_json(l.at("theta1"));
      layer.bias = matrix_from_json(l.at("bias")).row(0);
      m.net.layers.push_back(std::move(layer));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: malformed checkpoint: {}", path, e.what()));
  }
}

}  // namespace graphscore::gnn
