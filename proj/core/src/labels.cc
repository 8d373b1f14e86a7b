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

#include "graphscore/labels.h"

#include <algorithm>

#include <fmt/format.h>

#include "graphscore/csv.h"

namespace graphscore {

void LabelTable::add(LabelRecord record) {
  if (!(record.days_past_due_max >= 0))
    throw ConfigError(fmt::format("labels: invalid days_past_due_max for {} at period {}",
                                  record.entity, record.period));
  auto [eit, new_entity] = entered_.try_emplace(record.entity, record.entered_period);
  if (!new_entity && eit->second != record.entered_period)
    throw ConfigError(fmt::format("labels: entity {} has conflicting entered_period values",
                                  record.entity));
  const RowKey key{record.entity, record.period};
  if (!index_.try_emplace(key, rows_.size()).second)
    throw ConfigError(fmt::format("labels: duplicate row for {} at period {}", record.entity,
                                  record.period));
  if (new_entity) entities_.push_back(record.entity);
  if (rows_.empty()) {
    first_ = last_ = record.period;
  } else {
    first_ = std::min(first_, record.period);
    last_ = std::max(last_, record.period);
  }
  rows_.push_back(std::move(record));
}

const LabelRecord* LabelTable::find(const std::string& entity, Period p) const {
  auto it = index_.find(RowKey{entity, p});
  return it == index_.end() ? nullptr : &rows_[it->second];
}

std::optional<Period> LabelTable::entered_period(const std::string& entity) const {
  auto it = entered_.find(entity);
  if (it == entered_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> default_target(const LabelTable& labels, const std::string& entity,
                                  Period t, const TargetSpec& spec) {
  for (int k = 1; k <= spec.horizon; ++k) {
    const LabelRecord* row = labels.find(entity, t + k);
    if (!row) return std::nullopt;
    if (row->days_past_due_max >= spec.threshold) return 1;
  }
  return 0;
}

LabelTable load_labels(const std::string& path) {
  CsvReader reader(path);
  const auto ent = reader.require_column("entity");
  const auto per = reader.require_column("period");
  const auto dpd = reader.require_column("days_past_due_max");
  const auto entered = reader.require_column("entered_period");
  LabelTable table;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    LabelRecord r{std::string(f[ent]), reader.parse_int(f[per], "period"),
                  reader.parse_double(f[dpd], "days_past_due_max"),
                  reader.parse_int(f[entered], "entered_period")};
    try {
      table.add(std::move(r));
    } catch (const ConfigError& e) {
      reader.fail(e.what());
    }
  }
  if (table.size() == 0) throw EmptyInputError("'" + path + "' has no rows");
  return table;
}

void write_labels(const LabelTable& table, const std::string& path) {
  CsvWriter out(path);
  out.row({"entity", "period", "days_past_due_max", "entered_period"});
  for (const auto& r : table.rows())
    out.row({r.entity, std::to_string(r.period), format_number(r.days_past_due_max),
             std::to_string(r.entered_period)});
  out.close();
}

std::string_view to_string(EntityKind k) {
  return k == EntityKind::Person ? "Person" : "Business";
}

EntityKind entity_kind_from_string(std::string_view s) {
  if (s == "Person") return EntityKind::Person;
  if (s == "Business") return EntityKind::Business;
  throw ConfigError(fmt::format("unknown entity kind '{}'", s));
}

EntityKinds load_entity_kinds(const std::string& path) {
  CsvReader reader(path);
  const auto ent = reader.require_column("entity");
  const auto kind = reader.require_column("kind");
  EntityKinds out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    EntityKind k;
    try {
      k = entity_kind_from_string(f[kind]);
    } catch (const ConfigError& e) {
      reader.fail(e.what());
    }
    if (!out.try_emplace(std::string(f[ent]), k).second)
      reader.fail(fmt::format("duplicate entity '{}'", f[ent]));
  }
  if (out.empty()) throw EmptyInputError("'" + path + "' has no rows");
  return out;
}

void write_entity_kinds(const std::vector<std::pair<std::string, EntityKind>>& kinds,
                        const std::string& path) {
  CsvWriter out(path);
  out.row({"entity", "kind"});
  for (const auto& [e, k] : kinds) out.row({e, std::string(to_string(k))});
  out.close();
}

}  // namespace graphscore
