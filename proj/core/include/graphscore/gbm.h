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
#include <span>
#include <string>
#include <vector>

#include "graphscore/dataset.h"

namespace graphscore::gbm {

struct GbmParams {
  int n_trees = 100;
  int max_depth = 3;
  double shrinkage = 0.1;
  // Minimum training samples per leaf.
  int min_leaf = 20;
  // L2 penalty on leaf values: leaf = -G / (H + l2).
  double l2 = 1.0;
  int max_bins = 64;
  // Row subsampling per tree (1 uses every row, no randomness involved).
  double subsample = 1.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool missing_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output before shrinkage
  double cover = 0.0;  // training samples that reached the node
  bool is_leaf() const { return feature < 0; }
};

// Binary regression tree; node 0 is the root. x <= threshold goes left,
// missing values follow missing_left.
struct Tree {
  std::vector<TreeNode> nodes;

  int leaf_for(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes[leaf_for(x)].value; }
};

// margin = base_score + shrinkage * sum of tree outputs; probability is the
// logistic of the margin.
struct TreeEnsemble {
  double base_score = 0.0;
  double shrinkage = 0.1;
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;

  std::size_t num_features() const { return feature_names.size(); }
  double margin(std::span<const double> x) const;
  double probability(std::span<const double> x) const;
  // Row-wise margins; the matrix columns must match feature_names.
  std::vector<double> margins(const pipeline::DesignMatrix& m) const;
};

// Logistic-loss boosting with histogram splits. Missing values get their own
// bin and the side that maximizes the gain. A single-class target yields a
// base-score-only model and a warning. `loss_history` receives the mean
// training log-loss after each round (entry 0 is the base score alone).
TreeEnsemble train(const pipeline::DesignMatrix& m, std::span<const int> y,
                   const GbmParams& params, std::vector<double>* loss_history = nullptr);

double log_loss(std::span<const double> margins, std::span<const int> y);

}  // namespace graphscore::gbm
