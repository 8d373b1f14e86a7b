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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "graphscore/gbm.h"

namespace graphscore::explain {

// Per-sample additive attributions in margin (log-odds) space:
// base[i] + sum_f value(i, f) equals the model margin of sample i.
struct AttributionMatrix {
  std::vector<std::string> names;
  std::vector<FeatureGroup> groups;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major
  std::vector<double> base;

  std::size_t cols() const { return names.size(); }
  double at(std::size_t r, std::size_t f) const { return values[r * names.size() + f]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * names.size(), names.size()};
  }
};

// Expected margin under the training-cover distribution of every tree.
double expected_margin(const gbm::TreeEnsemble& model);

// Exact Shapley values of one sample under path-dependent (cover-weighted)
// conditioning. Returns one value per model feature; `base` receives the
// expected margin.
std::vector<double> tree_shap(const gbm::TreeEnsemble& model, std::span<const double> x,
                              double* base = nullptr);

// Rows of `m` in parallel; `m` columns must match the model features.
AttributionMatrix attribute(const gbm::TreeEnsemble& model, const pipeline::DesignMatrix& m,
                            unsigned jobs = 1);

// Stacks attribution matrices with identical columns.
AttributionMatrix concatenate(const std::vector<AttributionMatrix>& parts);

struct FeatureImportance {
  std::string name;
  FeatureGroup group = FeatureGroup::A;
  double mean_abs = 0.0;
  double share = 0.0;  // of the total mean |attribution|
};

struct ImportanceReport {
  // Descending by mean |attribution|, ties by name.
  std::vector<FeatureImportance> features;
  // Indexed by FeatureGroup; sums to 1 unless every attribution is zero.
  std::array<double, 5> group_share{};

  std::vector<FeatureImportance> top(std::size_t k) const;
};

ImportanceReport global_importance(const AttributionMatrix& a);

// feature,group,mean_abs_attr,share
void write_importance_csv(const ImportanceReport& r, const std::string& path);
// {"A": {"ATT01": share, ...}, ...} with feature shares of the total.
void write_treemap_json(const ImportanceReport& r, const std::string& path);

struct PermutationImportance {
  std::string name;
  double mean_drop = 0.0;  // AUC(original) - AUC(permuted), averaged

  friend bool operator==(const PermutationImportance&, const PermutationImportance&) = default;
};

// One entry per feature in column order.
std::vector<PermutationImportance> permutation_importance(const gbm::TreeEnsemble& model,
                                                          const pipeline::DesignMatrix& m,
                                                          std::span<const int> y, int repeats,
                                                          std::uint64_t seed, unsigned jobs = 1);

}  // namespace graphscore::explain
