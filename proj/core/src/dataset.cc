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

#include "graphscore/dataset.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "graphscore/random.h"

namespace graphscore::pipeline {

namespace {

constexpr std::string_view kBenchColumn = "Bench_Score";

struct SetInfo {
  FeatureSetId id;
  std::string_view name;
  std::uint8_t mask;  // bit g for FeatureGroup g
};

constexpr std::uint8_t bit(FeatureGroup g) { return static_cast<std::uint8_t>(1u << static_cast<int>(g)); }
constexpr std::uint8_t kA = bit(FeatureGroup::A), kB = bit(FeatureGroup::B),
                       kC = bit(FeatureGroup::C), kD = bit(FeatureGroup::D),
                       kE = bit(FeatureGroup::E);

constexpr SetInfo kSetInfo[] = {
    {FeatureSetId::A, "A", kA},
    {FeatureSetId::AB, "A+B", kA | kB},
    {FeatureSetId::ABC, "A+B+C", kA | kB | kC},
    {FeatureSetId::ABD, "A+B+D", kA | kB | kD},
    {FeatureSetId::ABE, "A+B+E", kA | kB | kE},
    {FeatureSetId::ABCD, "A+B+C+D", kA | kB | kC | kD},
    {FeatureSetId::ABCE, "A+B+C+E", kA | kB | kC | kE},
    {FeatureSetId::ABCDE, "A+B+C+D+E", kA | kB | kC | kD | kE},
};

const SetInfo& info(FeatureSetId id) { return kSetInfo[static_cast<int>(id)]; }

}  // namespace

std::string_view to_string(ScoringKind k) {
  return k == ScoringKind::Application ? "Application" : "Behavioral";
}

ScoringKind scoring_kind_from_string(std::string_view s) {
  if (s == "Application") return ScoringKind::Application;
  if (s == "Behavioral") return ScoringKind::Behavioral;
  throw ConfigError(fmt::format("unknown scoring kind '{}'", s));
}

std::string_view to_string(FeatureSetId id) { return info(id).name; }

FeatureSetId feature_set_from_string(std::string_view s) {
  for (const auto& i : kSetInfo)
    if (i.name == s) return i.id;
  throw ConfigError(fmt::format("unknown feature set '{}'", s));
}

bool includes(FeatureSetId id, FeatureGroup g) { return (info(id).mask & bit(g)) != 0; }

std::vector<Sample> select_samples(const LabelTable& labels, const EntityKinds& kinds,
                                   const ScenarioSpec& scenario, const TargetSpec& target,
                                   SamplingStats* stats) {
  SamplingStats local;
  SamplingStats& st = stats ? *stats : local;
  st = {};
  std::vector<Sample> out;
  if (labels.size() == 0) return out;
  const Period first_sampled = labels.first_period() + 1;
  for (const std::string& e : labels.entities()) {
    const Period entered = *labels.entered_period(e);
    auto kind = kinds.find(e);
    if (kind == kinds.end()) {
      ++st.unknown_kind;
      continue;
    }
    if (kind->second != scenario.entity_kind) {
      ++st.other_kind;
      continue;
    }
    std::vector<Period> candidates;
    if (scenario.scoring == ScoringKind::Application) {
      if (entered >= first_sampled && labels.find(e, entered)) candidates.push_back(entered);
    } else {
      for (Period t = std::max(first_sampled, entered + scenario.min_tenure);
           t <= labels.last_period(); ++t)
        if (labels.find(e, t)) candidates.push_back(t);
    }
    std::vector<Sample> kept;
    for (Period t : candidates) {
      ++st.candidates;
      if (labels.find(e, t)->days_past_due_max >= target.threshold) {
        ++st.in_default;
        continue;
      }
      const auto y = default_target(labels, e, t, target);
      if (!y) {
        ++st.incomplete_window;
        continue;
      }
      kept.push_back({RowKey{e, t}, *y});
    }
    const auto cap = static_cast<std::size_t>(scenario.max_samples_per_entity);
    if (scenario.scoring == ScoringKind::Behavioral && cap > 0 && kept.size() > cap) {
      Rng rng = make_rng(scenario.seed, {fnv1a(e)});
      // Partial Fisher-Yates, then restore period order.
      for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + std::min(kept.size() - i - 1,
                                           static_cast<std::size_t>(uniform01(rng) *
                                                                    static_cast<double>(kept.size() - i)));
        std::swap(kept[i], kept[j]);
      }
      st.capped += kept.size() - cap;
      kept.resize(cap);
      std::sort(kept.begin(), kept.end(),
                [](const Sample& a, const Sample& b) { return a.key.period < b.key.period; });
    }
    out.insert(out.end(), kept.begin(), kept.end());
  }
  return out;
}

FeatureFrame attribute_frame(const NodeAttributeTable& attrs) {
  FeatureFrame f;
  for (const auto& name : attrs.names())
    f.add_column(name, name == kBenchColumn ? FeatureGroup::B : FeatureGroup::A);
  for (std::size_t r = 0; r < attrs.num_rows(); ++r) {
    const std::size_t row = f.add_row(attrs.key(r));
    for (std::size_t c = 0; c < attrs.names().size(); ++c) f.set(row, c, attrs.value(r, c));
  }
  return f;
}

std::optional<std::size_t> LabeledDataset::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

std::vector<int> LabeledDataset::targets() const {
  std::vector<int> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].target;
  return y;
}

LabeledDataset assemble_dataset(std::vector<Sample> samples,
                                const std::vector<const FeatureFrame*>& frames) {
  LabeledDataset ds;
  ds.samples = std::move(samples);
  const std::size_t n = ds.samples.size();
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> presence_seen;
  for (const FeatureFrame* frame : frames) {
    for (const auto& col : frame->columns())
      if (!seen.insert(col.name).second)
        throw ConfigError(fmt::format("assemble_dataset: duplicate feature '{}'", col.name));
    // Row lookups once per frame.
    std::vector<std::optional<std::size_t>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
      rows[i] = frame->find(ds.samples[i].key.entity, ds.samples[i].key.period);
    for (const auto& col : frame->columns()) {
      std::vector<double> values(n);
      std::vector<Period> prov(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (rows[i]) {
          values[i] = col.values[*rows[i]];
          prov[i] = std::max(frame->key(*rows[i]).period, col.fitted_through);
        } else {
          values[i] = col.absent_fill;
          prov[i] = col.fitted_through;
        }
      }
      ds.names.push_back(col.name);
      ds.groups.push_back(col.group);
      ds.columns.push_back(std::move(values));
      ds.provenance.push_back(std::move(prov));
    }
    const auto& presence = frame->presence_indicator();
    if (presence && presence_seen.insert(*presence).second) {
      if (!seen.insert(*presence).second)
        throw ConfigError(fmt::format("assemble_dataset: duplicate feature '{}'", *presence));
      std::vector<double> values(n);
      std::vector<Period> prov(n, kStaticPeriod);
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = rows[i] ? 1.0 : 0.0;
        if (rows[i]) prov[i] = frame->key(*rows[i]).period;
      }
      ds.names.push_back(*presence);
      ds.groups.push_back(frame->presence_group());
      ds.columns.push_back(std::move(values));
      ds.provenance.push_back(std::move(prov));
    }
  }
  return ds;
}

std::vector<LeakageViolation> audit_provenance(const LabeledDataset& ds) {
  std::vector<LeakageViolation> out;
  for (std::size_t f = 0; f < ds.num_features(); ++f)
    for (std::size_t i = 0; i < ds.num_rows(); ++i)
      if (ds.provenance[f][i] > ds.samples[i].key.period)
        out.push_back({i, f, ds.provenance[f][i]});
  return out;
}

std::vector<std::size_t> feature_set_columns(const LabeledDataset& ds, FeatureSetId id) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < ds.num_features(); ++f)
    if (includes(id, ds.groups[f])) out.push_back(f);
  return out;
}

std::vector<std::size_t> all_rows(const LabeledDataset& ds) {
  std::vector<std::size_t> rows(ds.num_rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

Imputer Imputer::fit(const LabeledDataset& ds, std::span<const std::size_t> rows,
                     std::vector<std::size_t> columns) {
  Imputer imp;
  imp.columns_ = std::move(columns);
  imp.medians_.resize(imp.columns_.size());
  imp.indicator_.assign(imp.columns_.size(), 0);
  std::vector<double> present;
  for (std::size_t k = 0; k < imp.columns_.size(); ++k) {
    const auto& col = ds.columns.at(imp.columns_[k]);
    present.clear();
    for (std::size_t r : rows) {
      const double v = col[r];
      if (is_missing(v)) {
        imp.indicator_[k] = 1;
      } else {
        present.push_back(v);
      }
    }
    double median = 0.0;
    if (!present.empty()) {
      const std::size_t m = present.size() / 2;
      std::nth_element(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(m),
                       present.end());
      median = present[m];
      if (present.size() % 2 == 0) {
        const double lower = *std::max_element(present.begin(),
                                               present.begin() + static_cast<std::ptrdiff_t>(m));
        median = 0.5 * (median + lower);
      }
    }
    imp.medians_[k] = median;
  }
  return imp;
}

DesignMatrix Imputer::apply(const LabeledDataset& ds, std::span<const std::size_t> rows) const {
  DesignMatrix m;
  m.rows = rows.size();
  std::size_t cols = columns_.size();
  for (char flag : indicator_) cols += flag ? 1 : 0;
  m.values.reserve(cols * m.rows);
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    const std::size_t f = columns_[k];
    m.names.push_back(ds.names[f]);
    m.groups.push_back(ds.groups[f]);
    for (std::size_t r : rows) {
      const double v = ds.columns[f][r];
      m.values.push_back(is_missing(v) ? medians_[k] : v);
    }
  }
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (!indicator_[k]) continue;
    const std::size_t f = columns_[k];
    m.names.push_back(ds.names[f] + "_missing");
    m.groups.push_back(ds.groups[f]);
    for (std::size_t r : rows) m.values.push_back(is_missing(ds.columns[f][r]) ? 1.0 : 0.0);
  }
  return m;
}

}  // namespace graphscore::pipeline
