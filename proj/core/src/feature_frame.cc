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

#include "graphscore/feature_frame.h"

#include "graphscore/csv.h"

namespace graphscore {

std::size_t FeatureFrame::add_column(std::string name, FeatureGroup group,
                                     Period fitted_through, double absent_fill) {
  auto [it, inserted] = column_index_.try_emplace(name, columns_.size());
  if (!inserted) throw ConfigError("duplicate feature column '" + name + "'");
  FeatureColumn col;
  col.name = std::move(name);
  col.group = group;
  col.fitted_through = fitted_through;
  col.absent_fill = absent_fill;
  col.values.assign(keys_.size(), kMissing);
  columns_.push_back(std::move(col));
  return it->second;
}

std::size_t FeatureFrame::add_row(const RowKey& key) {
  auto [it, inserted] = index_.try_emplace(key, keys_.size());
  if (!inserted) return it->second;
  keys_.push_back(key);
  for (auto& c : columns_) c.values.push_back(kMissing);
  return it->second;
}

std::optional<std::size_t> FeatureFrame::column_index(const std::string& name) const {
  auto it = column_index_.find(name);
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FeatureFrame::find_exact(const RowKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FeatureFrame::find(const std::string& entity,
                                              Period period) const {
  if (auto r = find_exact(RowKey{entity, period})) return r;
  if (period != kStaticPeriod) return find_exact(RowKey{entity, kStaticPeriod});
  return std::nullopt;
}

void write_frame_csv(const FeatureFrame& frame, const std::string& path) {
  CsvWriter out(path);
  std::vector<std::string> row{"entity", "period"};
  for (const auto& c : frame.columns()) row.push_back(c.name);
  out.row(row);
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    row.clear();
    row.push_back(frame.key(r).entity);
    row.push_back(std::to_string(frame.key(r).period));
    for (std::size_t c = 0; c < frame.num_columns(); ++c)
      row.push_back(format_number(frame.at(r, c)));
    out.row(row);
  }
  out.close();
}

}  // namespace graphscore
