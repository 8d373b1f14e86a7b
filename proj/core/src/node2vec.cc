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

#include "graphscore/node2vec.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "graphscore/parallel.h"
#include "graphscore/random.h"

namespace graphscore::n2v {

void N2VConfig::validate() const {
  if (dimensions < 1) throw ConfigError("node2vec: dimensions must be >= 1");
  if (walks_per_node < 1 || walk_length < 1 || window < 1 || negatives < 1)
    throw ConfigError("node2vec: walk and sampling counts must be >= 1");
  if (epochs < 0) throw ConfigError("node2vec: epochs must be >= 0");
  if (!(p > 0) || !(q > 0)) throw ConfigError("node2vec: p and q must be positive");
  if (!(learning_rate > 0)) throw ConfigError("node2vec: learning_rate must be positive");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// Nodes in external-id order.
std::vector<NodeIndex> canonical_order(const Graph& g) {
  std::vector<NodeIndex> order(g.num_nodes());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::sort(order.begin(), order.end(),
            [&](NodeIndex a, NodeIndex b) { return g.id(a) < g.id(b); });
  return order;
}

class Walker {
 public:
  Walker(const Graph& g, const N2VConfig& cfg) : g_(g), cfg_(cfg) {
    offsets_.resize(g.num_nodes() + 1, 0);
    for (NodeIndex v = 0; v < g.num_nodes(); ++v) offsets_[v + 1] = offsets_[v] + g.degree(v);
    first_.resize(g.num_nodes());
    for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
      if (g.degree(v) == 0) continue;
      std::vector<double> w;
      for (const auto& nb : g.neighbors(v)) w.push_back(nb.weight);
      first_[v] = AliasTable(w);
    }
    second_.resize(offsets_.back());
    once_ = std::make_unique<std::once_flag[]>(offsets_.back());
  }

  Walk walk(NodeIndex start, Rng& rng) const {
    Walk w{start};
    w.reserve(cfg_.walk_length);
    if (g_.degree(start) == 0) return w;
    while (static_cast<int>(w.size()) < cfg_.walk_length) {
      const NodeIndex cur = w.back();
      const auto nbrs = g_.neighbors(cur);
      if (nbrs.empty()) break;
      if (w.size() == 1) {
        w.push_back(nbrs[first_[cur].sample(rng)].node);
        continue;
      }
      const NodeIndex prev = w[w.size() - 2];
      // Slot of the directed edge prev -> cur within prev's adjacency.
      const auto pn = g_.neighbors(prev);
      const auto it = std::lower_bound(pn.begin(), pn.end(), cur, [&](const auto& nb, NodeIndex x) {
        return g_.id(nb.node) < g_.id(x);
      });
      const std::size_t slot = offsets_[prev] + static_cast<std::size_t>(it - pn.begin());
      std::call_once(once_[slot], [&] { second_[slot] = transition_table(prev, cur); });
      w.push_back(nbrs[second_[slot].sample(rng)].node);
    }
    return w;
  }

 private:
  AliasTable transition_table(NodeIndex prev, NodeIndex cur) const {
    std::vector<double> w;
    for (const auto& nb : g_.neighbors(cur)) {
      double bias;
      if (nb.node == prev) {
        bias = 1.0 / cfg_.p;
      } else if (g_.adjacent(prev, nb.node)) {
        bias = 1.0;
      } else {
        bias = 1.0 / cfg_.q;
      }
      w.push_back(nb.weight * bias);
    }
    return AliasTable(w);
  }

  const Graph& g_;
  const N2VConfig& cfg_;
  std::vector<std::size_t> offsets_;
  std::vector<AliasTable> first_;
  mutable std::vector<AliasTable> second_;
  std::unique_ptr<std::once_flag[]> once_;
};

// Per-target coefficients s(u.v_j) - label_j, positive target first. Returns
// the pair loss.
double sgns_kernel(const double* u, const double* const* targets, std::size_t count,
                   std::size_t dims, double* coef) {
  double loss = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    double dot = 0.0;
    for (std::size_t k = 0; k < dims; ++k) dot += u[k] * targets[j][k];
    const double label = j == 0 ? 1.0 : 0.0;
    coef[j] = sigmoid(dot) - label;
    loss -= j == 0 ? log_sigmoid(dot) : log_sigmoid(-dot);
  }
  return loss;
}

}  // namespace

std::vector<Walk> biased_walks(const Graph& g, const N2VConfig& cfg) {
  cfg.validate();
  const Walker walker(g, cfg);
  const auto order = canonical_order(g);
  const std::size_t n = order.size();
  std::vector<Walk> corpus(n * static_cast<std::size_t>(cfg.walks_per_node));
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    const std::size_t r = i / n;
    const NodeIndex v = order[i % n];
    Rng rng = make_rng(cfg.seed, {fnv1a(g.id(v)), r});
    corpus[i] = walker.walk(v, rng);
  });
  return corpus;
}

double sgns_loss(const SkipGramModel& m, std::size_t center, std::size_t context,
                 std::span<const std::size_t> negatives, SkipGramModel* grad) {
  const std::size_t d = m.dims;
  std::vector<std::size_t> ids{context};
  ids.insert(ids.end(), negatives.begin(), negatives.end());
  std::vector<const double*> targets;
  for (auto i : ids) targets.push_back(m.vectors.data() + i * d);
  std::vector<double> coef(targets.size());
  const double* u = m.vectors.data() + center * d;
  const double loss = sgns_kernel(u, targets.data(), targets.size(), d, coef.data());
  if (grad) {
    for (std::size_t j = 0; j < ids.size(); ++j)
      for (std::size_t k = 0; k < d; ++k) {
        grad->vectors[center * d + k] += coef[j] * targets[j][k];
        grad->vectors[ids[j] * d + k] += coef[j] * u[k];
      }
  }
  return loss;
}

TrainResult train_skipgram(const std::vector<Walk>& corpus, std::size_t num_nodes,
                           const N2VConfig& cfg) {
  cfg.validate();
  const std::size_t d = static_cast<std::size_t>(cfg.dimensions);
  TrainResult result;
  auto& m = result.model;
  m.num_nodes = num_nodes;
  m.dims = d;
  m.vectors.resize(num_nodes * d);
  Rng init = make_rng(cfg.seed, {fnv1a("skipgram-init")});
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  for (auto& x : m.vectors) x = normal(init);

  std::vector<double> counts(num_nodes, 0.0);
  std::size_t tokens = 0;
  for (const auto& w : corpus) {
    for (auto v : w) counts[v] += 1.0;
    tokens += w.size();
  }
  if (tokens == 0 || cfg.epochs == 0) return result;
  for (auto& c : counts) c = std::pow(c, 0.75);
  const AliasTable unigram(counts);

  Rng rng = make_rng(cfg.seed, {fnv1a("skipgram-train")});
  const double total = static_cast<double>(tokens) * cfg.epochs;
  double done = 0.0;
  const std::size_t max_targets = 1 + static_cast<std::size_t>(cfg.negatives);
  std::vector<const double*> targets(max_targets);
  std::vector<std::size_t> ids(max_targets);
  std::vector<double> coef(max_targets), grad_u(d), u_old(d);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& walk : corpus) {
      const std::size_t len = walk.size();
      for (std::size_t i = 0; i < len; ++i, done += 1.0) {
        const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - done / total);
        const std::size_t lo = i >= static_cast<std::size_t>(cfg.window) ? i - cfg.window : 0;
        const std::size_t hi = std::min(len, i + cfg.window + 1);
        double* u = m.vectors.data() + walk[i] * d;
        for (std::size_t j = lo; j < hi; ++j) {
          const std::size_t ctx = walk[j];
          if (j == i || ctx == walk[i]) continue;
          std::size_t count = 0;
          ids[count++] = ctx;
          for (int k = 0; k < cfg.negatives; ++k) {
            const std::size_t neg = unigram.sample(rng);
            if (neg != ctx && neg != walk[i]) ids[count++] = neg;
          }
          for (std::size_t t = 0; t < count; ++t) targets[t] = m.vectors.data() + ids[t] * d;
          loss_sum += sgns_kernel(u, targets.data(), count, d, coef.data());
          ++pairs;
          // Gradients use the pre-update values of every vector involved.
          std::copy_n(u, d, u_old.begin());
          std::fill(grad_u.begin(), grad_u.end(), 0.0);
          for (std::size_t t = 0; t < count; ++t) {
            double* v = m.vectors.data() + ids[t] * d;
            for (std::size_t k = 0; k < d; ++k) grad_u[k] += coef[t] * v[k];
          }
          for (std::size_t t = 0; t < count; ++t) {
            double* v = m.vectors.data() + ids[t] * d;
            for (std::size_t k = 0; k < d; ++k) v[k] -= lr * coef[t] * u_old[k];
          }
          for (std::size_t k = 0; k < d; ++k) u[k] -= lr * grad_u[k];
        }
      }
    }
    result.epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  return result;
}

TrainResult embed(const Graph& g, const N2VConfig& cfg) {
  const auto order = canonical_order(g);
  std::vector<NodeIndex> rank(g.num_nodes());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<NodeIndex>(r);
  auto corpus = biased_walks(g, cfg);
  for (auto& w : corpus)
    for (auto& v : w) v = rank[v];
  TrainResult ranked = train_skipgram(corpus, g.num_nodes(), cfg);

  TrainResult out;
  out.epoch_loss = std::move(ranked.epoch_loss);
  auto& m = out.model;
  m.num_nodes = ranked.model.num_nodes;
  m.dims = ranked.model.dims;
  m.vectors.resize(ranked.model.vectors.size());
  const std::size_t d = m.dims;
  for (NodeIndex v = 0; v < g.num_nodes(); ++v)
    std::copy_n(ranked.model.vectors.begin() + rank[v] * d, d, m.vectors.begin() + v * d);
  return out;
}

std::string column_name(int dim, const std::string& network) {
  return fmt::format("N2V_EMB_{:02d}_{}", dim, network);
}

FeatureFrame n2v_frame(const TemporalNetwork& net, const N2VConfig& cfg,
                       const std::optional<std::vector<Period>>& periods) {
  cfg.validate();
  FeatureFrame frame;
  for (int k = 1; k <= cfg.dimensions; ++k)
    frame.add_column(column_name(k, net.name), FeatureGroup::E, kStaticPeriod, 0.0);
  frame.set_presence_indicator(network_presence_column(net.name), FeatureGroup::E);

  for (std::size_t s = 0; s < net.snapshots.size(); ++s) {
    const Period p = net.periods[s];
    if (periods && !net.is_static() &&
        std::find(periods->begin(), periods->end(), p) == periods->end())
      continue;
    const Graph& g = net.snapshots[s];
    if (g.empty()) continue;
    N2VConfig period_cfg = cfg;
    period_cfg.seed = derive_seed(cfg.seed, {fnv1a(net.name), static_cast<std::uint64_t>(p)});
    const auto trained = embed(g, period_cfg);
    for (const auto v : canonical_order(g)) {
      const std::size_t row = frame.add_row({g.id(v), p});
      const auto vec = trained.model.vector(v);
      for (int k = 0; k < cfg.dimensions; ++k) frame.set(row, k, vec[k]);
    }
  }
  return frame;
}

}  // namespace graphscore::n2v
