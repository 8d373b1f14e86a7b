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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "graphscore/common.h"

namespace graphscore {

// Worst delinquency per (entity, period) for entities in the credit system,
// with the period the entity entered the system.
struct LabelRecord {
  std::string entity;
  Period period = 0;
  double days_past_due_max = 0.0;
  Period entered_period = 0;
};

class LabelTable {
 public:
  // Throws ConfigError on a duplicate key, a negative dpd value, or an entry
  // period that disagrees with an earlier row of the same entity.
  void add(LabelRecord record);

  std::size_t size() const { return rows_.size(); }
  const std::vector<LabelRecord>& rows() const { return rows_; }
  const LabelRecord* find(const std::string& entity, Period p) const;
  std::optional<Period> entered_period(const std::string& entity) const;
  // Entities in first-seen order.
  const std::vector<std::string>& entities() const { return entities_; }
  Period first_period() const { return first_; }
  Period last_period() const { return last_; }

 private:
  std::vector<LabelRecord> rows_;
  std::unordered_map<RowKey, std::size_t, RowKeyHash> index_;
  std::unordered_map<std::string, Period> entered_;
  std::vector<std::string> entities_;
  Period first_ = 0;
  Period last_ = 0;
};

// Default: worst delinquency reaching `threshold` within `horizon` periods
// after the observation point.
struct TargetSpec {
  int horizon = 12;
  double threshold = 90.0;
};

// 1 when the entity reaches the threshold in (t, t + horizon], 0 when it does
// not and every period of the window is observed, nullopt otherwise.
std::optional<int> default_target(const LabelTable& labels, const std::string& entity,
                                  Period t, const TargetSpec& spec = {});

// entity,period,days_past_due_max,entered_period
LabelTable load_labels(const std::string& path);
void write_labels(const LabelTable& table, const std::string& path);

enum class EntityKind : std::uint8_t { Person, Business };

std::string_view to_string(EntityKind k);
EntityKind entity_kind_from_string(std::string_view s);

using EntityKinds = std::unordered_map<std::string, EntityKind>;

// entity,kind with kind in {Person, Business}
EntityKinds load_entity_kinds(const std::string& path);
void write_entity_kinds(const std::vector<std::pair<std::string, EntityKind>>& kinds,
                        const std::string& path);

}  // namespace graphscore
