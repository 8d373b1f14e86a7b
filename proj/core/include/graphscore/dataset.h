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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphscore/common.h"
#include "graphscore/feature_frame.h"
#include "graphscore/graph.h"
#include "graphscore/labels.h"

namespace graphscore::pipeline {

enum class ScoringKind : std::uint8_t { Application, Behavioral };

std::string_view to_string(ScoringKind k);
ScoringKind scoring_kind_from_string(std::string_view s);

struct ScenarioSpec {
  ScoringKind scoring = ScoringKind::Application;
  EntityKind entity_kind = EntityKind::Person;
  // Behavioral scoring samples entities this many periods after entry.
  int min_tenure = 6;
  // Behavioral only: keep at most this many periods per entity (0 keeps all),
  // drawn with a per-entity stream of `seed`.
  int max_samples_per_entity = 0;
  std::uint64_t seed = 1;
};

// The eight experiment feature sets, A through A+B+C+D+E.
enum class FeatureSetId : std::uint8_t { A, AB, ABC, ABD, ABE, ABCD, ABCE, ABCDE };

inline constexpr std::array<FeatureSetId, 8> kFeatureSets = {
    FeatureSetId::A,   FeatureSetId::AB,   FeatureSetId::ABC,  FeatureSetId::ABD,
    FeatureSetId::ABE, FeatureSetId::ABCD, FeatureSetId::ABCE, FeatureSetId::ABCDE};

std::string_view to_string(FeatureSetId id);  // "A+B+C"
FeatureSetId feature_set_from_string(std::string_view s);
bool includes(FeatureSetId id, FeatureGroup g);

struct Sample {
  RowKey key;
  int target = 0;
};

struct SamplingStats {
  std::size_t candidates = 0;
  std::size_t other_kind = 0;
  std::size_t unknown_kind = 0;
  std::size_t in_default = 0;
  // Samples dropped because the target window is not fully observed.
  std::size_t incomplete_window = 0;
  std::size_t capped = 0;
};

// Observation points for a scenario. The first labelled period is never
// sampled: it is reserved for fitting feature extractors. Entities in default
// at the observation point are excluded. Output is ordered by entity (label
// order) then period.
std::vector<Sample> select_samples(const LabelTable& labels, const EntityKinds& kinds,
                                   const ScenarioSpec& scenario, const TargetSpec& target = {},
                                   SamplingStats* stats = nullptr);

// Node attributes as a frame: Bench_Score in group B, the rest in group A.
FeatureFrame attribute_frame(const NodeAttributeTable& attrs);

// Samples joined with features, stored column-major. provenance[f][i] is the
// latest period of data feature f draws on for sample i.
struct LabeledDataset {
  std::vector<Sample> samples;
  std::vector<std::string> names;
  std::vector<FeatureGroup> groups;
  std::vector<std::vector<double>> columns;
  std::vector<std::vector<Period>> provenance;

  std::size_t num_rows() const { return samples.size(); }
  std::size_t num_features() const { return names.size(); }
  std::optional<std::size_t> feature_index(std::string_view name) const;
  std::vector<int> targets() const;
};

// Joins every frame at each sample's own (entity, period), falling back to the
// frame's static rows. Entities missing from a frame read its absent_fill.
// Frames that share a presence indicator contribute it once. Throws
// ConfigError on any other duplicate feature name.
LabeledDataset assemble_dataset(std::vector<Sample> samples,
                                const std::vector<const FeatureFrame*>& frames);

struct LeakageViolation {
  std::size_t sample = 0;
  std::size_t feature = 0;
  Period provenance = 0;
};

// Cells whose provenance is later than the sample period.
std::vector<LeakageViolation> audit_provenance(const LabeledDataset& ds);

// Columns whose group belongs to the feature set, in dataset order.
std::vector<std::size_t> feature_set_columns(const LabeledDataset& ds, FeatureSetId id);

// Dense column-major matrix handed to selection and models.
struct DesignMatrix {
  std::vector<std::string> names;
  std::vector<FeatureGroup> groups;
  std::size_t rows = 0;
  std::vector<double> values;

  std::size_t cols() const { return names.size(); }
  std::span<const double> column(std::size_t c) const { return {values.data() + c * rows, rows}; }
  double at(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
};

// Median imputation with `<name>_missing` indicators, fitted on training rows
// only. Indicators are added for columns with a missing value among those
// rows; an all-missing column imputes 0.
class Imputer {
 public:
  static Imputer fit(const LabeledDataset& ds, std::span<const std::size_t> rows,
                     std::vector<std::size_t> columns);

  DesignMatrix apply(const LabeledDataset& ds, std::span<const std::size_t> rows) const;

  const std::vector<std::size_t>& columns() const { return columns_; }
  const std::vector<double>& medians() const { return medians_; }

 private:
  std::vector<std::size_t> columns_;
  std::vector<double> medians_;
  std::vector<char> indicator_;
};

// Every row of the dataset.
std::vector<std::size_t> all_rows(const LabeledDataset& ds);

}  // namespace graphscore::pipeline
