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

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphscore/common.h"

namespace graphscore {

struct FeatureColumn {
  std::string name;
  FeatureGroup group = FeatureGroup::A;
  // Latest period of data used to fit whatever produced this column (models,
  // normalization statistics). Row values themselves come from the row period.
  Period fitted_through = kStaticPeriod;
  // Value used for entities that have no row in the frame.
  double absent_fill = kMissing;
  std::vector<double> values;
};

// Entity x feature table keyed by (entity, period). Rows of frames derived
// from static networks use kStaticPeriod and match every period on lookup.
class FeatureFrame {
 public:
  std::size_t add_column(std::string name, FeatureGroup group,
                         Period fitted_through = kStaticPeriod,
                         double absent_fill = kMissing);
  std::size_t add_row(const RowKey& key);

  std::size_t num_rows() const { return keys_.size(); }
  std::size_t num_columns() const { return columns_.size(); }
  const RowKey& key(std::size_t row) const { return keys_[row]; }
  const std::vector<RowKey>& keys() const { return keys_; }

  const FeatureColumn& column(std::size_t c) const { return columns_[c]; }
  FeatureColumn& column(std::size_t c) { return columns_[c]; }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  std::optional<std::size_t> column_index(const std::string& name) const;

  double at(std::size_t row, std::size_t col) const { return columns_[col].values[row]; }
  void set(std::size_t row, std::size_t col, double v) { columns_[col].values[row] = v; }

  std::optional<std::size_t> find_exact(const RowKey& key) const;
  // Exact (entity, period) match first, then the entity's static row.
  std::optional<std::size_t> find(const std::string& entity, Period period) const;

  // When set, joins emit an extra column with this name holding 1 for entities
  // present in the frame and 0 otherwise.
  void set_presence_indicator(std::string name, FeatureGroup group) {
    presence_name_ = std::move(name);
    presence_group_ = group;
  }
  const std::optional<std::string>& presence_indicator() const { return presence_name_; }
  FeatureGroup presence_group() const { return presence_group_; }

 private:
  std::vector<RowKey> keys_;
  std::unordered_map<RowKey, std::size_t, RowKeyHash> index_;
  std::vector<FeatureColumn> columns_;
  std::unordered_map<std::string, std::size_t> column_index_;
  std::optional<std::string> presence_name_;
  FeatureGroup presence_group_ = FeatureGroup::E;
};

// Presence indicator shared by the embedding frames of one network.
inline std::string network_presence_column(const std::string& network) {
  return "NET_PRESENT_" + network;
}

// Dumps `entity,period,<columns>`.
void write_frame_csv(const FeatureFrame& frame, const std::string& path);

}  // namespace graphscore
