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

#include "graphscore/explain.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "graphscore/csv.h"
#include "graphscore/metrics.h"
#include "graphscore/parallel.h"
#include "graphscore/random.h"

namespace graphscore::explain {

namespace {

using gbm::Tree;
using gbm::TreeNode;

// Polynomial-time recursion over unique feature paths: each element keeps the
// fraction of "feature absent" (zero) and "feature present" (one) flow and the
// permutation weights of the subsets that reach it.
struct PathElement {
  int feature = -1;
  double zero = 0.0;
  double one = 0.0;
  double weight = 0.0;
};

void extend(PathElement* path, unsigned depth, double zero, double one, int feature) {
  path[depth] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    path[i + 1].weight += one * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

void unwind(PathElement* path, unsigned depth, unsigned index) {
  const double one = path[index].one;
  const double zero = path[index].zero;
  double next = path[depth].weight;
  for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
    if (one != 0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / static_cast<double>((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (unsigned i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero = path[i + 1].zero;
    path[i].one = path[i + 1].one;
  }
}

double unwound_sum(const PathElement* path, unsigned depth, unsigned index) {
  const double one = path[index].one;
  const double zero = path[index].zero;
  double next = path[depth].weight;
  double total = 0.0;
  if (one != 0) {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i) {
      const double tmp = next / static_cast<double>((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * (depth - i);
    }
  } else {
    for (int i = static_cast<int>(depth) - 1; i >= 0; --i)
      total += path[i].weight / (zero * (depth - i));
  }
  return total * (depth + 1);
}

bool goes_left(const TreeNode& n, std::span<const double> x) {
  const double v = x[static_cast<std::size_t>(n.feature)];
  return is_missing(v) ? n.missing_left : v <= n.threshold;
}

void recurse(const Tree& t, std::span<const double> x, double scale, std::vector<double>& phi,
             int node, unsigned depth, PathElement* parent_path, double zero, double one,
             int feature) {
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth + 1, path);
  extend(path, depth, zero, one, feature);

  const TreeNode& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) {
    for (unsigned i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      phi[static_cast<std::size_t>(path[i].feature)] +=
          w * (path[i].one - path[i].zero) * n.value * scale;
    }
    return;
  }
  const int hot = goes_left(n, x) ? n.left : n.right;
  const int cold = hot == n.left ? n.right : n.left;
  const double hot_zero = t.nodes[static_cast<std::size_t>(hot)].cover / n.cover;
  const double cold_zero = t.nodes[static_cast<std::size_t>(cold)].cover / n.cover;
  double incoming_zero = 1.0, incoming_one = 1.0;
  unsigned k = 0;
  for (; k <= depth; ++k)
    if (path[k].feature == n.feature) break;
  if (k != depth + 1) {
    incoming_zero = path[k].zero;
    incoming_one = path[k].one;
    unwind(path, depth, k);
    --depth;
  }
  recurse(t, x, scale, phi, hot, depth + 1, path, hot_zero * incoming_zero, incoming_one,
          n.feature);
  recurse(t, x, scale, phi, cold, depth + 1, path, cold_zero * incoming_zero, 0.0, n.feature);
}

int tree_depth(const Tree& t, int node = 0) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(tree_depth(t, n.left), tree_depth(t, n.right));
}

double tree_expectation(const Tree& t, int node = 0) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return n.value;
  const double wl = t.nodes[static_cast<std::size_t>(n.left)].cover / n.cover;
  const double wr = t.nodes[static_cast<std::size_t>(n.right)].cover / n.cover;
  return wl * tree_expectation(t, n.left) + wr * tree_expectation(t, n.right);
}

}  // namespace

double expected_margin(const gbm::TreeEnsemble& model) {
  double sum = 0.0;
  for (const Tree& t : model.trees) sum += tree_expectation(t);
  return model.base_score + model.shrinkage * sum;
}

std::vector<double> tree_shap(const gbm::TreeEnsemble& model, std::span<const double> x,
                              double* base) {
  if (x.size() != model.num_features())
    throw DimensionError(fmt::format("tree_shap: expected {} features, got {}",
                                     model.num_features(), x.size()));
  std::vector<double> phi(model.num_features(), 0.0);
  std::vector<PathElement> buffer;
  for (const Tree& t : model.trees) {
    if (t.nodes.size() < 2) continue;  // a lone leaf adds nothing beyond the base
    const auto d = static_cast<std::size_t>(tree_depth(t));
    buffer.assign((d + 2) * (d + 3) / 2, {});
    recurse(t, x, model.shrinkage, phi, 0, 0, buffer.data(), 1.0, 1.0, -1);
  }
  if (base) *base = expected_margin(model);
  return phi;
}

AttributionMatrix attribute(const gbm::TreeEnsemble& model, const pipeline::DesignMatrix& m,
                            unsigned jobs) {
  if (m.names != model.feature_names)
    throw DimensionError("attribute: matrix columns differ from the model");
  AttributionMatrix a;
  a.names = m.names;
  a.groups = m.groups;
  a.rows = m.rows;
  a.values.resize(m.rows * m.cols());
  a.base.assign(m.rows, expected_margin(model));
  parallel_for(m.rows, jobs, [&](std::size_t r) {
    std::vector<double> x(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) x[c] = m.at(r, c);
    const auto phi = tree_shap(model, x);
    std::copy(phi.begin(), phi.end(), a.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols()));
  });
  return a;
}

AttributionMatrix concatenate(const std::vector<AttributionMatrix>& parts) {
  AttributionMatrix out;
  if (parts.empty()) return out;
  out.names = parts[0].names;
  out.groups = parts[0].groups;
  for (const auto& p : parts) {
    if (p.names != out.names) throw DimensionError("concatenate: attribution columns differ");
    out.rows += p.rows;
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
    out.base.insert(out.base.end(), p.base.begin(), p.base.end());
  }
  return out;
}

std::vector<FeatureImportance> ImportanceReport::top(std::size_t k) const {
  return {features.begin(), features.begin() + static_cast<std::ptrdiff_t>(std::min(k, features.size()))};
}

ImportanceReport global_importance(const AttributionMatrix& a) {
  ImportanceReport r;
  double total = 0.0;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) sum += std::abs(a.at(i, f));
    const double mean = a.rows ? sum / static_cast<double>(a.rows) : 0.0;
    r.features.push_back({a.names[f], a.groups[f], mean, 0.0});
    total += mean;
  }
  for (auto& f : r.features) {
    f.share = total > 0 ? f.mean_abs / total : 0.0;
    r.group_share[static_cast<std::size_t>(f.group)] += f.share;
  }
  std::sort(r.features.begin(), r.features.end(),
            [](const FeatureImportance& x, const FeatureImportance& y) {
              return x.mean_abs != y.mean_abs ? x.mean_abs > y.mean_abs : x.name < y.name;
            });
  return r;
}

void write_importance_csv(const ImportanceReport& r, const std::string& path) {
  CsvWriter out(path);
  out.row({"feature", "group", "mean_abs_attr", "share"});
  for (const auto& f : r.features)
    out.row({f.name, std::string(to_string(f.group)), format_number(f.mean_abs),
             format_number(f.share)});
  out.close();
}

void write_treemap_json(const ImportanceReport& r, const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (FeatureGroup g : {FeatureGroup::A, FeatureGroup::B, FeatureGroup::C, FeatureGroup::D,
                         FeatureGroup::E}) {
    nlohmann::ordered_json members = nlohmann::ordered_json::object();
    for (const auto& f : r.features)
      if (f.group == g) members[f.name] = f.share;
    j[std::string(to_string(g))] = std::move(members);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::vector<PermutationImportance> permutation_importance(const gbm::TreeEnsemble& model,
                                                          const pipeline::DesignMatrix& m,
                                                          std::span<const int> y, int repeats,
                                                          std::uint64_t seed, unsigned jobs) {
  if (repeats < 1) throw ConfigError("permutation_importance: repeats must be positive");
  const double reference = metrics::auc(model.margins(m), y);
  std::vector<PermutationImportance> out(m.cols());
  parallel_for(m.cols(), jobs, [&](std::size_t f) {
    pipeline::DesignMatrix shuffled = m;
    double drop = 0.0;
    for (int k = 0; k < repeats; ++k) {
      Rng rng = make_rng(seed, {f, static_cast<std::uint64_t>(k)});
      std::vector<double> col(m.column(f).begin(), m.column(f).end());
      std::shuffle(col.begin(), col.end(), rng);
      std::copy(col.begin(), col.end(),
                shuffled.values.begin() + static_cast<std::ptrdiff_t>(f * m.rows));
      drop += reference - metrics::auc(model.margins(shuffled), y);
    }
    out[f] = {m.names[f], drop / repeats};
  });
  return out;
}

}  // namespace graphscore::explain
