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

#include <span>
#include <string>
#include <vector>

#include "graphscore/dataset.h"

namespace graphscore::pipeline {

enum class Ordering : std::uint8_t { Auc, Ks };
enum class Correlation : std::uint8_t { Pearson, Spearman };

struct SelectionConfig {
  double ks_min = 0.01;
  double auc_min = 0.53;
  double rho = 0.7;
  Ordering ordering = Ordering::Auc;
  Correlation correlation = Correlation::Pearson;
  unsigned jobs = 1;

  void validate() const;  // throws ConfigError
};

struct FeatureScore {
  std::size_t column = 0;
  std::string name;
  FeatureGroup group = FeatureGroup::A;
  // Oriented: max(auc, 1 - auc).
  double auc = 0.5;
  double ks = 0.0;
};

// AUC and KS of every column used as the sole score.
std::vector<FeatureScore> score_features(const DesignMatrix& m, std::span<const int> y,
                                         unsigned jobs = 1);

// Features with KS > ks_min and AUC > auc_min, in column order.
std::vector<FeatureScore> bivariate_filter(const DesignMatrix& m, std::span<const int> y,
                                           const SelectionConfig& cfg);

// Descending by the configured metric, ties broken by name.
void order_by_power(std::vector<FeatureScore>& scores, Ordering ordering);

// Walks `ordered` and keeps a column when its absolute correlation with every
// column kept so far is below rho. The first column is always kept.
std::vector<std::size_t> greedy_decorrelate(const DesignMatrix& m,
                                            std::span<const std::size_t> ordered, double rho,
                                            Correlation correlation = Correlation::Pearson);

// Stage-1 buckets: A and B together, then C, D and E on their own.
int selection_bucket(FeatureGroup g);

struct SelectionResult {
  // One entry per column of the matrix, in column order.
  std::vector<FeatureScore> scores;
  std::vector<char> passed_filter;
  std::vector<char> stage1_kept;
  std::vector<char> stage2_kept;
  // Stage-2 survivors in selection order.
  std::vector<std::string> selected;
};

// Filter, decorrelate within each stage-1 bucket, then decorrelate globally
// over the stage-1 survivors whose group belongs to `set`.
SelectionResult two_stage_selection(const DesignMatrix& m, std::span<const int> y,
                                    const SelectionConfig& cfg,
                                    FeatureSetId set = FeatureSetId::ABCDE);

// Re-runs stage 2 of a finished selection for another feature set.
std::vector<std::string> select_for_set(const DesignMatrix& m, const SelectionResult& r,
                                        const SelectionConfig& cfg, FeatureSetId set);

// feature,group,auc,ks,stage1_kept,stage2_kept
void write_selection_report(const SelectionResult& r, const std::string& path);

}  // namespace graphscore::pipeline
