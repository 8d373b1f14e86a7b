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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphscore/dataset.h"
#include "graphscore/explain.h"
#include "graphscore/gbm.h"
#include "graphscore/selection.h"

namespace graphscore::evaluation {

enum class Metric : std::uint8_t { Auc, Ks };
std::string_view to_string(Metric m);  // "AUC", "KS"

// Hyper-parameter grid searched on the tuning slice.
struct HyperGrid {
  std::vector<int> n_trees = {100, 300};
  std::vector<int> max_depth = {3, 5};
  std::vector<double> shrinkage = {0.05, 0.1};
  std::vector<int> min_leaf = {20};

  void validate() const;  // throws ConfigError
  // Cartesian product in (trees, depth, shrinkage, min_leaf) order; other
  // fields come from `base`.
  std::vector<gbm::GbmParams> expand(const gbm::GbmParams& base) const;
};

// Positions into the input, each list ascending.
struct Split {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
};

// Each class is shuffled and round(fraction * class size) of it goes to `first`.
Split stratified_split(std::span<const int> y, double fraction, std::uint64_t seed);

// Fold id per element. Stratified: each class is shuffled and dealt
// round-robin, the second class continuing where the first stopped, so fold
// sizes differ by at most one. Otherwise a plain shuffled deal.
std::vector<int> assign_folds(std::span<const int> y, int k, std::uint64_t seed,
                              bool stratified = true);

// Dataset rows picked by position.
std::vector<std::size_t> take(std::span<const std::size_t> rows,
                              std::span<const std::size_t> positions);

// Dataset column indices of the given feature names; throws ConfigError on an
// unknown name.
std::vector<std::size_t> columns_by_name(const pipeline::LabeledDataset& ds,
                                         std::span<const std::string> names);

struct TuningTrial {
  gbm::GbmParams params;
  double auc = 0.0;
};

struct TuningResult {
  gbm::GbmParams best;
  std::vector<TuningTrial> trials;  // grid order
};

// Grid search scored by validation AUC on a stratified internal split of
// `rows` (validation_fraction held out). Imputation is fitted on the internal
// training part. Exact AUC ties keep the earlier grid point.
TuningResult tune_hyperparameters(const pipeline::LabeledDataset& ds,
                                  std::span<const std::size_t> rows,
                                  std::span<const std::size_t> columns, const HyperGrid& grid,
                                  const gbm::GbmParams& base, double validation_fraction,
                                  std::uint64_t seed, unsigned jobs = 1);

struct SetSpec {
  std::string name;
  std::vector<std::string> features;
};

struct SetResult {
  std::string name;
  std::vector<std::string> features;
  std::vector<double> auc;  // per fold
  std::vector<double> ks;
  // Out-of-fold margin per evaluated row (position order).
  std::vector<double> oof_margin;

  const std::vector<double>& values(Metric m) const { return m == Metric::Auc ? auc : ks; }
};

struct CVConfig {
  int n_folds = 10;
  bool stratified = true;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  // Raw column scored as the baseline.
  std::string bench_feature = "Bench_Score";
  // Set whose fold models are explained on their held-out rows.
  std::optional<std::string> explain_set;
  // Permutation-importance repeats on each fold's training rows (0 skips it).
  int permutation_repeats = 0;

  void validate() const;  // throws ConfigError
};

struct CVResult {
  int n_folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> rows;  // evaluated dataset rows
  std::vector<int> folds;         // fold id per row position
  std::vector<SetResult> sets;    // input order
  SetResult bench;                // name "BENCH"
  // Pooled out-of-fold attributions of explain_set, in row position order.
  // Columns are the set features followed by every missing indicator any
  // fold model used; a column a fold model lacked is 0 for its rows.
  std::optional<explain::AttributionMatrix> attributions;
  // Training-row AUC drop per attribution column, averaged over folds.
  std::vector<explain::PermutationImportance> permutation;

  const SetResult& find(std::string_view name) const;  // includes "BENCH"
};

// The same fold partition is reused for every set and for the baseline. Each
// fold fits imputation on its training rows, trains one model per set with the
// frozen hyper-parameters and scores the held-out rows.
CVResult cross_validate(const pipeline::LabeledDataset& ds, std::span<const std::size_t> rows,
                        const std::vector<SetSpec>& sets, const gbm::GbmParams& hp,
                        const CVConfig& cfg);

struct ComparisonVerdict {
  std::string a;
  std::string b;
  Metric metric = Metric::Auc;
  double mean_diff = 0.0;  // mean of a - b
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  bool reject = false;
  // Every paired difference is identical: the variance is zero, so t is
  // infinite (reject) or, for a zero difference, 0 (no rejection).
  bool degenerate = false;
};

// Two-sided paired t-test on a - b with n - 1 degrees of freedom.
ComparisonVerdict paired_ttest(std::span<const double> a, std::span<const double> b,
                               double alpha = 0.05);

ComparisonVerdict compare(const CVResult& cv, std::string_view a, std::string_view b, Metric m,
                          double alpha = 0.05);

// One row per feature set and metric: relative improvement over the baseline
// (row - bench) / bench, averaged over folds.
struct ReportRow {
  std::string feature_set;
  Metric metric = Metric::Auc;
  double mean = 0.0;  // relative improvement
  double std = 0.0;   // sample standard deviation across folds
  double raw_mean = 0.0;
  double raw_std = 0.0;
  double p_value = 1.0;  // paired test against the baseline
  bool significant_vs_bench = false;
  // Highest raw mean, or not significantly different from it.
  bool is_best = false;
};

std::vector<ReportRow> relative_improvement_table(const CVResult& cv, double alpha = 0.05);

// feature_set,metric,mean,std,significant_vs_bench,is_best
void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);
// feature_set,metric,fold,value (baseline rows included)
void write_fold_metrics_csv(const CVResult& cv, const std::string& path);
nlohmann::ordered_json report_json(const CVResult& cv, const std::vector<ReportRow>& rows);
// Feature sets down, AUC and KS across. Cells read "+1.23% ± 0.45%"; "*" when
// the baseline test fails to reject; best significant cells in bold.
std::string report_markdown(const std::vector<ReportRow>& rows);

// Full protocol on one labelled dataset: stratified tuning slice, two-stage
// selection and hyper-parameter search on that slice, then cross-validation
// of every feature set on the remaining rows.
struct EvaluationConfig {
  pipeline::SelectionConfig selection;
  HyperGrid grid;
  gbm::GbmParams base;
  double tuning_fraction = 0.3;
  double validation_fraction = 0.3;
  int n_folds = 10;
  bool stratified = true;
  std::string bench_feature = "Bench_Score";
  std::string explain_set = "A+B+C+D+E";
  int permutation_repeats = 1;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  void validate() const;  // throws ConfigError
};

// Tuning slice, two-stage selection on it and the per-set feature lists.
struct SelectionOutcome {
  Split split;  // first: tuning slice, second: evaluation rows (dataset rows)
  pipeline::SelectionResult selection;
  std::vector<SetSpec> sets;  // the eight feature sets
};

// Selection runs on the median-imputed tuning slice without missing
// indicators, so selected names are dataset columns. Throws when a feature
// set keeps no feature.
SelectionOutcome select_on_tuning_slice(const pipeline::LabeledDataset& ds,
                                        const EvaluationConfig& cfg);

struct ValidationOutcome {
  TuningResult tuning;
  CVResult cv;
};

// Hyper-parameter search on the tuning slice with the full set's features,
// then cross-validation of every set on the evaluation rows.
ValidationOutcome validate_sets(const pipeline::LabeledDataset& ds, const SelectionOutcome& sel,
                                const EvaluationConfig& cfg);

struct EvaluationOutcome {
  SelectionOutcome selection;
  ValidationOutcome validation;
};

EvaluationOutcome evaluate(const pipeline::LabeledDataset& ds, const EvaluationConfig& cfg);

// Fold metrics, folds and rows without attributions or margins.
nlohmann::ordered_json cv_to_json(const CVResult& cv);
CVResult cv_from_json(const nlohmann::json& j);

}  // namespace graphscore::evaluation
