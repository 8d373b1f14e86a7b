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

#include "graphscore/selection.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "graphscore/csv.h"
#include "graphscore/metrics.h"
#include "graphscore/parallel.h"

namespace graphscore::pipeline {

void SelectionConfig::validate() const {
  if (!(rho > 0 && rho < 1)) throw ConfigError("selection: rho must lie in (0, 1)");
  if (!(ks_min >= 0 && ks_min < 1)) throw ConfigError("selection: ks_min must lie in [0, 1)");
  if (!(auc_min >= 0.5 && auc_min < 1))
    throw ConfigError("selection: auc_min must lie in [0.5, 1)");
}

std::vector<FeatureScore> score_features(const DesignMatrix& m, std::span<const int> y,
                                         unsigned jobs) {
  if (y.size() != m.rows) throw DimensionError("score_features: target length differs");
  std::vector<FeatureScore> out(m.cols());
  parallel_for(m.cols(), jobs, [&](std::size_t c) {
    const auto col = m.column(c);
    const double auc = metrics::auc(col, y);
    out[c] = {c, m.names[c], m.groups[c], std::max(auc, 1.0 - auc), metrics::ks(col, y)};
  });
  return out;
}

std::vector<FeatureScore> bivariate_filter(const DesignMatrix& m, std::span<const int> y,
                                           const SelectionConfig& cfg) {
  cfg.validate();
  std::vector<FeatureScore> out;
  for (auto& s : score_features(m, y, cfg.jobs))
    if (s.ks > cfg.ks_min && s.auc > cfg.auc_min) out.push_back(std::move(s));
  return out;
}

void order_by_power(std::vector<FeatureScore>& scores, Ordering ordering) {
  std::sort(scores.begin(), scores.end(), [&](const FeatureScore& a, const FeatureScore& b) {
    const double ka = ordering == Ordering::Auc ? a.auc : a.ks;
    const double kb = ordering == Ordering::Auc ? b.auc : b.ks;
    if (ka != kb) return ka > kb;
    return a.name < b.name;
  });
}

std::vector<std::size_t> greedy_decorrelate(const DesignMatrix& m,
                                            std::span<const std::size_t> ordered, double rho,
                                            Correlation correlation) {
  std::unordered_map<std::size_t, std::vector<double>> ranks;
  auto values = [&](std::size_t c) -> std::span<const double> {
    if (correlation == Correlation::Pearson) return m.column(c);
    auto it = ranks.find(c);
    if (it == ranks.end()) it = ranks.emplace(c, metrics::midranks(m.column(c))).first;
    return it->second;
  };
  std::vector<std::size_t> kept;
  for (std::size_t c : ordered) {
    bool ok = true;
    for (std::size_t s : kept) {
      if (std::abs(metrics::pearson(values(c), values(s))) >= rho) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  return kept;
}

int selection_bucket(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::A:
    case FeatureGroup::B: return 0;
    case FeatureGroup::C: return 1;
    case FeatureGroup::D: return 2;
    case FeatureGroup::E: return 3;
  }
  return 0;
}

namespace {

std::vector<std::size_t> stage_two(const DesignMatrix& m, const SelectionResult& r,
                                   const SelectionConfig& cfg, FeatureSetId set) {
  std::vector<FeatureScore> pool;
  for (std::size_t c = 0; c < r.scores.size(); ++c)
    if (r.stage1_kept[c] && includes(set, r.scores[c].group)) pool.push_back(r.scores[c]);
  order_by_power(pool, cfg.ordering);
  std::vector<std::size_t> order;
  for (const auto& s : pool) order.push_back(s.column);
  return greedy_decorrelate(m, order, cfg.rho, cfg.correlation);
}

}  // namespace

SelectionResult two_stage_selection(const DesignMatrix& m, std::span<const int> y,
                                    const SelectionConfig& cfg, FeatureSetId set) {
  cfg.validate();
  SelectionResult r;
  r.scores = score_features(m, y, cfg.jobs);
  r.passed_filter.assign(m.cols(), 0);
  r.stage1_kept.assign(m.cols(), 0);
  r.stage2_kept.assign(m.cols(), 0);
  std::vector<FeatureScore> buckets[4];
  for (const auto& s : r.scores) {
    if (s.ks > cfg.ks_min && s.auc > cfg.auc_min) {
      r.passed_filter[s.column] = 1;
      buckets[selection_bucket(s.group)].push_back(s);
    }
  }
  for (auto& bucket : buckets) {
    order_by_power(bucket, cfg.ordering);
    std::vector<std::size_t> order;
    for (const auto& s : bucket) order.push_back(s.column);
    for (std::size_t c : greedy_decorrelate(m, order, cfg.rho, cfg.correlation))
      r.stage1_kept[c] = 1;
  }
  for (std::size_t c : stage_two(m, r, cfg, set)) {
    r.stage2_kept[c] = 1;
    r.selected.push_back(m.names[c]);
  }
  return r;
}

std::vector<std::string> select_for_set(const DesignMatrix& m, const SelectionResult& r,
                                        const SelectionConfig& cfg, FeatureSetId set) {
  std::vector<std::string> out;
  for (std::size_t c : stage_two(m, r, cfg, set)) out.push_back(m.names[c]);
  return out;
}

void write_selection_report(const SelectionResult& r, const std::string& path) {
  CsvWriter out(path);
  out.row({"feature", "group", "auc", "ks", "stage1_kept", "stage2_kept"});
  for (std::size_t c = 0; c < r.scores.size(); ++c) {
    const auto& s = r.scores[c];
    out.row({s.name, std::string(to_string(s.group)), format_number(s.auc),
             format_number(s.ks), r.stage1_kept[c] ? "1" : "0", r.stage2_kept[c] ? "1" : "0"});
  }
  out.close();
}

}  // namespace graphscore::pipeline
