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

#include "graphscore/evaluation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "graphscore/csv.h"
#include "graphscore/metrics.h"
#include "graphscore/parallel.h"
#include "graphscore/random.h"

namespace graphscore::evaluation {
namespace {

enum Stream : std::uint64_t { kSplit = 1, kFolds, kTuning, kPermutation };

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<int> targets_at(const pipeline::LabeledDataset& ds, std::span<const std::size_t> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(ds.samples[r].target);
  return y;
}

// Positions of each class, shuffled with one stream per class.
std::array<std::vector<std::size_t>, 2> shuffled_classes(std::span<const int> y,
                                                         std::uint64_t seed,
                                                         std::uint64_t stream) {
  std::array<std::vector<std::size_t>, 2> cls;
  for (std::size_t i = 0; i < y.size(); ++i) cls[y[i] ? 1 : 0].push_back(i);
  for (std::uint64_t c = 0; c < 2; ++c) {
    Rng rng = make_rng(seed, {stream, c});
    std::shuffle(cls[c].begin(), cls[c].end(), rng);
  }
  return cls;
}

}  // namespace

std::string_view to_string(Metric m) { return m == Metric::Auc ? "AUC" : "KS"; }

void HyperGrid::validate() const {
  if (n_trees.empty() || max_depth.empty() || shrinkage.empty() || min_leaf.empty())
    throw ConfigError("hyper-parameter grid: every axis needs at least one value");
}

std::vector<gbm::GbmParams> HyperGrid::expand(const gbm::GbmParams& base) const {
  validate();
  std::vector<gbm::GbmParams> out;
  for (int t : n_trees)
    for (int d : max_depth)
      for (double s : shrinkage)
        for (int l : min_leaf) {
          gbm::GbmParams p = base;
          p.n_trees = t;
          p.max_depth = d;
          p.shrinkage = s;
          p.min_leaf = l;
          p.validate();
          out.push_back(p);
        }
  return out;
}

Split stratified_split(std::span<const int> y, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  auto cls = shuffled_classes(y, seed, kSplit);
  Split s;
  for (auto& c : cls) {
    const auto n = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(c.size())));
    s.first.insert(s.first.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n));
    s.second.insert(s.second.end(), c.begin() + static_cast<std::ptrdiff_t>(n), c.end());
  }
  std::sort(s.first.begin(), s.first.end());
  std::sort(s.second.begin(), s.second.end());
  return s;
}

std::vector<int> assign_folds(std::span<const int> y, int k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw ConfigError("cross-validation needs at least two folds");
  if (y.size() < static_cast<std::size_t>(k))
    throw ConfigError(fmt::format("cannot split {} rows into {} folds", y.size(), k));
  std::vector<int> folds(y.size(), 0);
  std::size_t deal = 0;
  if (stratified) {
    const auto cls = shuffled_classes(y, seed, kFolds);
    for (const auto& c : cls)
      for (std::size_t i : c) folds[i] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  } else {
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(seed, {kFolds, 2});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) folds[i] = static_cast<int>(deal++ % static_cast<std::size_t>(k));
  }
  return folds;
}

std::vector<std::size_t> take(std::span<const std::size_t> rows,
                              std::span<const std::size_t> positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(rows[p]);
  return out;
}

std::vector<std::size_t> columns_by_name(const pipeline::LabeledDataset& ds,
                                         std::span<const std::string> names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    const auto c = ds.feature_index(n);
    if (!c) throw ConfigError("unknown feature '" + n + "'");
    out.push_back(*c);
  }
  return out;
}

TuningResult tune_hyperparameters(const pipeline::LabeledDataset& ds,
                                  std::span<const std::size_t> rows,
                                  std::span<const std::size_t> columns, const HyperGrid& grid,
                                  const gbm::GbmParams& base, double validation_fraction,
                                  std::uint64_t seed, unsigned jobs) {
  const auto params = grid.expand(base);
  const auto y = targets_at(ds, rows);
  const Split inner = stratified_split(y, validation_fraction, derive_seed(seed, {kTuning}));
  const auto train_rows = take(rows, inner.second);
  const auto valid_rows = take(rows, inner.first);
  const auto imputer =
      pipeline::Imputer::fit(ds, train_rows, {columns.begin(), columns.end()});
  const auto train_m = imputer.apply(ds, train_rows);
  const auto valid_m = imputer.apply(ds, valid_rows);
  const auto train_y = targets_at(ds, train_rows);
  const auto valid_y = targets_at(ds, valid_rows);

  TuningResult out;
  out.trials.resize(params.size());
  parallel_for(params.size(), jobs, [&](std::size_t i) {
    const auto model = gbm::train(train_m, train_y, params[i]);
    out.trials[i] = {params[i], metrics::auc(model.margins(valid_m), valid_y)};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.trials.size(); ++i)
    if (out.trials[i].auc > out.trials[best].auc) best = i;
  out.best = out.trials[best].params;
  return out;
}

void CVConfig::validate() const {
  if (n_folds < 2) throw ConfigError("cross-validation needs at least two folds");
  if (permutation_repeats < 0) throw ConfigError("permutation repeats must be non-negative");
}

const SetResult& CVResult::find(std::string_view name) const {
  if (name == bench.name) return bench;
  for (const auto& s : sets)
    if (s.name == name) return s;
  throw ConfigError(fmt::format("no cross-validation result for '{}'", name));
}

namespace {

struct FoldOutput {
  std::vector<double> margins;  // held-out rows in position order
  double auc = 0.0;
  double ks = 0.0;
  std::optional<explain::AttributionMatrix> attributions;
  std::vector<explain::PermutationImportance> permutation;
};

}  // namespace

CVResult cross_validate(const pipeline::LabeledDataset& ds, std::span<const std::size_t> rows,
                        const std::vector<SetSpec>& sets, const gbm::GbmParams& hp,
                        const CVConfig& cfg) {
  cfg.validate();
  hp.validate();
  CVResult cv;
  cv.n_folds = cfg.n_folds;
  cv.seed = cfg.seed;
  cv.rows.assign(rows.begin(), rows.end());
  const auto y = targets_at(ds, rows);
  cv.folds = assign_folds(y, cfg.n_folds, cfg.seed, cfg.stratified);

  const std::size_t k = static_cast<std::size_t>(cfg.n_folds);
  std::vector<std::vector<std::size_t>> test_pos(k), train_pos(k);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t f = 0; f < k; ++f)
      (static_cast<std::size_t>(cv.folds[i]) == f ? test_pos[f] : train_pos[f]).push_back(i);

  std::optional<std::size_t> explain_index;
  std::vector<std::vector<std::size_t>> set_columns;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (sets[s].features.empty())
      throw ConfigError("feature set '" + sets[s].name + "' has no features");
    set_columns.push_back(columns_by_name(ds, sets[s].features));
    if (cfg.explain_set && sets[s].name == *cfg.explain_set) explain_index = s;
  }
  if (cfg.explain_set && !explain_index)
    throw ConfigError("explain set '" + *cfg.explain_set + "' is not evaluated");
  const std::vector<std::string> bench_name = {cfg.bench_feature};
  const std::size_t bench_column = columns_by_name(ds, bench_name)[0];

  // Task s * k + f trains set s on fold f; the last k tasks score the baseline.
  std::vector<FoldOutput> out((sets.size() + 1) * k);
  parallel_for(out.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t s = task / k;
    const std::size_t f = task % k;
    const auto train_rows = take(rows, train_pos[f]);
    const auto test_rows = take(rows, test_pos[f]);
    const auto test_y = targets_at(ds, test_rows);
    FoldOutput& o = out[task];
    if (s == sets.size()) {
      const auto imputer = pipeline::Imputer::fit(ds, train_rows, {bench_column});
      const auto m = imputer.apply(ds, test_rows);
      o.margins.assign(m.column(0).begin(), m.column(0).end());
    } else {
      const auto imputer = pipeline::Imputer::fit(ds, train_rows, set_columns[s]);
      const auto train_m = imputer.apply(ds, train_rows);
      const auto test_m = imputer.apply(ds, test_rows);
      const auto model = gbm::train(train_m, targets_at(ds, train_rows), hp);
      o.margins = model.margins(test_m);
      if (explain_index == s) {
        // Single-threaded inside a task; tasks already run in parallel.
        o.attributions = explain::attribute(model, test_m, 1);
        // Permutation runs on the training rows: it then measures reliance, as
        // attributions do, rather than held-out generalization.
        if (cfg.permutation_repeats > 0)
          o.permutation = explain::permutation_importance(
              model, train_m, targets_at(ds, train_rows), cfg.permutation_repeats,
              derive_seed(cfg.seed, {kPermutation, f}), 1);
      }
    }
    o.auc = metrics::auc(o.margins, test_y);
    o.ks = metrics::ks(o.margins, test_y);
  });

  auto collect = [&](std::string name, std::vector<std::string> features, std::size_t s) {
    SetResult r{std::move(name), std::move(features), {}, {}, std::vector<double>(y.size())};
    for (std::size_t f = 0; f < k; ++f) {
      const FoldOutput& o = out[s * k + f];
      r.auc.push_back(o.auc);
      r.ks.push_back(o.ks);
      for (std::size_t j = 0; j < test_pos[f].size(); ++j) r.oof_margin[test_pos[f][j]] = o.margins[j];
    }
    return r;
  };
  for (std::size_t s = 0; s < sets.size(); ++s)
    cv.sets.push_back(collect(sets[s].name, sets[s].features, s));
  cv.bench = collect("BENCH", bench_name, sets.size());

  if (explain_index) {
    const std::size_t s = *explain_index;
    // Union of columns: set features, then indicators in feature order.
    std::vector<std::string> names = sets[s].features;
    std::vector<FeatureGroup> groups;
    for (std::size_t c : set_columns[s]) groups.push_back(ds.groups[c]);
    for (std::size_t i = 0; i < sets[s].features.size(); ++i) {
      const std::string ind = sets[s].features[i] + "_missing";
      for (std::size_t f = 0; f < k; ++f) {
        const auto& a = *out[s * k + f].attributions;
        if (std::find(a.names.begin(), a.names.end(), ind) != a.names.end()) {
          names.push_back(ind);
          groups.push_back(groups[i]);
          break;
        }
      }
    }
    std::map<std::string, std::size_t> slot;
    for (std::size_t c = 0; c < names.size(); ++c) slot[names[c]] = c;

    explain::AttributionMatrix pooled;
    pooled.names = names;
    pooled.groups = groups;
    pooled.rows = y.size();
    pooled.values.assign(y.size() * names.size(), 0.0);
    pooled.base.assign(y.size(), 0.0);
    std::vector<double> drop(names.size(), 0.0);
    for (std::size_t f = 0; f < k; ++f) {
      const FoldOutput& o = out[s * k + f];
      const auto& a = *o.attributions;
      for (std::size_t j = 0; j < a.rows; ++j) {
        const std::size_t pos = test_pos[f][j];
        pooled.base[pos] = a.base[j];
        for (std::size_t c = 0; c < a.cols(); ++c)
          pooled.values[pos * names.size() + slot.at(a.names[c])] = a.at(j, c);
      }
      for (const auto& p : o.permutation) drop[slot.at(p.name)] += p.mean_drop / static_cast<double>(k);
    }
    cv.attributions = std::move(pooled);
    if (cfg.permutation_repeats > 0)
      for (std::size_t c = 0; c < names.size(); ++c) cv.permutation.push_back({names[c], drop[c]});
  }
  return cv;
}

ComparisonVerdict paired_ttest(std::span<const double> a, std::span<const double> b,
                               double alpha) {
  if (a.size() != b.size())
    throw DimensionError(fmt::format("paired t-test: {} vs {} values", a.size(), b.size()));
  if (a.size() < 2) throw DimensionError("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  ComparisonVerdict v;
  v.df = static_cast<int>(d.size()) - 1;
  v.mean_diff = mean_of(d);
  const bool constant = std::all_of(d.begin(), d.end(), [&](double x) { return x == d[0]; });
  if (constant) {
    v.degenerate = true;
    if (v.mean_diff == 0.0) {
      v.t = 0.0;
      v.p = 1.0;
    } else {
      v.t = std::copysign(std::numeric_limits<double>::infinity(), v.mean_diff);
      v.p = 0.0;
    }
  } else {
    const double se = sd_of(d) / std::sqrt(static_cast<double>(d.size()));
    v.t = v.mean_diff / se;
    const boost::math::students_t dist(v.df);
    v.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(v.t)));
  }
  v.reject = v.p < alpha;
  return v;
}

ComparisonVerdict compare(const CVResult& cv, std::string_view a, std::string_view b, Metric m,
                          double alpha) {
  ComparisonVerdict v = paired_ttest(cv.find(a).values(m), cv.find(b).values(m), alpha);
  v.a = std::string(a);
  v.b = std::string(b);
  v.metric = m;
  return v;
}

std::vector<ReportRow> relative_improvement_table(const CVResult& cv, double alpha) {
  std::vector<ReportRow> rows;
  for (Metric m : {Metric::Auc, Metric::Ks}) {
    const auto& bench = cv.bench.values(m);
    for (double b : bench)
      if (b == 0.0) throw Error("baseline metric is zero on a fold; relative improvement undefined");
    const std::size_t first = rows.size();
    std::size_t best = first;
    for (const auto& s : cv.sets) {
      const auto& v = s.values(m);
      std::vector<double> rel(v.size());
      for (std::size_t f = 0; f < v.size(); ++f) rel[f] = (v[f] - bench[f]) / bench[f];
      const auto test = paired_ttest(v, bench, alpha);
      ReportRow r;
      r.feature_set = s.name;
      r.metric = m;
      r.mean = mean_of(rel);
      r.std = sd_of(rel);
      r.raw_mean = mean_of(v);
      r.raw_std = sd_of(v);
      r.p_value = test.p;
      r.significant_vs_bench = test.reject;
      rows.push_back(r);
      if (r.raw_mean > rows[best].raw_mean) best = rows.size() - 1;
    }
    const auto& best_values = cv.sets[best - first].values(m);
    for (std::size_t i = first; i < rows.size(); ++i)
      rows[i].is_best =
          i == best || !paired_ttest(cv.sets[i - first].values(m), best_values, alpha).reject;
  }
  return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  CsvWriter w(path);
  w.row({"feature_set", "metric", "mean", "std", "significant_vs_bench", "is_best"});
  for (const auto& r : rows)
    w.row({r.feature_set, std::string(to_string(r.metric)), format_number(r.mean),
           format_number(r.std), r.significant_vs_bench ? "1" : "0", r.is_best ? "1" : "0"});
  w.close();
}

void write_fold_metrics_csv(const CVResult& cv, const std::string& path) {
  CsvWriter w(path);
  w.row({"feature_set", "metric", "fold", "value"});
  auto emit = [&](const SetResult& s) {
    for (Metric m : {Metric::Auc, Metric::Ks}) {
      const auto& v = s.values(m);
      for (std::size_t f = 0; f < v.size(); ++f)
        w.row({s.name, std::string(to_string(m)), std::to_string(f), format_number(v[f])});
    }
  };
  emit(cv.bench);
  for (const auto& s : cv.sets) emit(s);
  w.close();
}

nlohmann::ordered_json report_json(const CVResult& cv, const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json j;
  j["n_folds"] = cv.n_folds;
  j["seed"] = cv.seed;
  j["rows"] = cv.rows.size();
  auto folds = [](const SetResult& s) {
    nlohmann::ordered_json f;
    f["AUC"] = s.auc;
    f["KS"] = s.ks;
    return f;
  };
  j["bench"] = folds(cv.bench);
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json e;
    e["feature_set"] = r.feature_set;
    e["metric"] = to_string(r.metric);
    e["mean"] = r.mean;
    e["std"] = r.std;
    e["significant_vs_bench"] = r.significant_vs_bench;
    e["is_best"] = r.is_best;
    e["raw_mean"] = r.raw_mean;
    e["raw_std"] = r.raw_std;
    e["p_value"] = r.p_value;
    table.push_back(std::move(e));
  }
  j["table"] = std::move(table);
  nlohmann::ordered_json sets = nlohmann::ordered_json::object();
  for (const auto& s : cv.sets) {
    auto e = folds(s);
    e["features"] = s.features;
    sets[s.name] = std::move(e);
  }
  j["sets"] = std::move(sets);
  return j;
}

std::string report_markdown(const std::vector<ReportRow>& rows) {
  std::vector<std::string> order;
  std::map<std::pair<std::string, Metric>, const ReportRow*> cell;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.feature_set) == order.end())
      order.push_back(r.feature_set);
    cell[{r.feature_set, r.metric}] = &r;
  }
  std::ostringstream out;
  out << "| Feature set | AUC | KS |\n|---|---|---|\n";
  for (const auto& name : order) {
    out << "| " << name;
    for (Metric m : {Metric::Auc, Metric::Ks}) {
      const auto it = cell.find({name, m});
      std::string text = "";
      if (it != cell.end()) {
        const ReportRow& r = *it->second;
        // A suppressed cell has no value to highlight.
        if (!r.significant_vs_bench) {
          text = "*";
        } else {
          text = fmt::format("{:+.2f}% ± {:.2f}%", 100.0 * r.mean, 100.0 * r.std);
          if (r.is_best) text = "**" + text + "**";
        }
      }
      out << " | " << text;
    }
    out << " |\n";
  }
  return out.str();
}

void EvaluationConfig::validate() const {
  selection.validate();
  grid.validate();
  base.validate();
  if (!(tuning_fraction > 0.0 && tuning_fraction < 1.0))
    throw ConfigError("tuning fraction must lie in (0, 1)");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ConfigError("validation fraction must lie in (0, 1)");
  if (n_folds < 2) throw ConfigError("cross-validation needs at least two folds");
  if (permutation_repeats < 0) throw ConfigError("permutation repeats must be non-negative");
  pipeline::feature_set_from_string(explain_set);
}

SelectionOutcome select_on_tuning_slice(const pipeline::LabeledDataset& ds,
                                        const EvaluationConfig& cfg) {
  cfg.validate();
  if (ds.num_rows() == 0) throw EmptyInputError("evaluation: the dataset has no samples");
  SelectionOutcome out;
  out.split = stratified_split(ds.targets(), cfg.tuning_fraction, cfg.seed);

  std::vector<std::size_t> all_columns(ds.num_features());
  std::iota(all_columns.begin(), all_columns.end(), 0);
  const auto imputer = pipeline::Imputer::fit(ds, out.split.first, all_columns);
  pipeline::DesignMatrix tuning_m = imputer.apply(ds, out.split.first);
  // Drop the indicators: selection ranks dataset columns only.
  tuning_m.names.resize(all_columns.size());
  tuning_m.groups.resize(all_columns.size());
  tuning_m.values.resize(all_columns.size() * tuning_m.rows);
  const auto tuning_y = targets_at(ds, out.split.first);

  out.selection = pipeline::two_stage_selection(tuning_m, tuning_y, cfg.selection);
  for (pipeline::FeatureSetId id : pipeline::kFeatureSets) {
    SetSpec s{std::string(pipeline::to_string(id)),
              pipeline::select_for_set(tuning_m, out.selection, cfg.selection, id)};
    if (s.features.empty())
      throw Error("feature set " + s.name + " kept no feature after selection");
    out.sets.push_back(std::move(s));
  }
  return out;
}

ValidationOutcome validate_sets(const pipeline::LabeledDataset& ds, const SelectionOutcome& sel,
                                const EvaluationConfig& cfg) {
  cfg.validate();
  const auto full = std::find_if(sel.sets.begin(), sel.sets.end(),
                                 [&](const SetSpec& s) { return s.name == cfg.explain_set; });
  if (full == sel.sets.end())
    throw ConfigError("explain set '" + cfg.explain_set + "' is not among the evaluated sets");
  ValidationOutcome out;
  const auto& largest = *std::max_element(
      sel.sets.begin(), sel.sets.end(),
      [](const SetSpec& a, const SetSpec& b) { return a.features.size() < b.features.size(); });
  out.tuning = tune_hyperparameters(ds, sel.split.first, columns_by_name(ds, largest.features),
                                    cfg.grid, cfg.base, cfg.validation_fraction, cfg.seed,
                                    cfg.jobs);
  CVConfig cv;
  cv.n_folds = cfg.n_folds;
  cv.stratified = cfg.stratified;
  cv.seed = cfg.seed;
  cv.jobs = cfg.jobs;
  cv.bench_feature = cfg.bench_feature;
  cv.explain_set = cfg.explain_set;
  cv.permutation_repeats = cfg.permutation_repeats;
  out.cv = cross_validate(ds, sel.split.second, sel.sets, out.tuning.best, cv);
  return out;
}

EvaluationOutcome evaluate(const pipeline::LabeledDataset& ds, const EvaluationConfig& cfg) {
  EvaluationOutcome out;
  out.selection = select_on_tuning_slice(ds, cfg);
  out.validation = validate_sets(ds, out.selection, cfg);
  return out;
}

nlohmann::ordered_json cv_to_json(const CVResult& cv) {
  nlohmann::ordered_json j;
  j["n_folds"] = cv.n_folds;
  j["seed"] = cv.seed;
  j["rows"] = cv.rows;
  j["folds"] = cv.folds;
  auto set = [](const SetResult& s) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["features"] = s.features;
    e["AUC"] = s.auc;
    e["KS"] = s.ks;
    return e;
  };
  j["bench"] = set(cv.bench);
  j["sets"] = nlohmann::ordered_json::array();
  for (const auto& s : cv.sets) j["sets"].push_back(set(s));
  return j;
}

CVResult cv_from_json(const nlohmann::json& j) {
  try {
    CVResult cv;
    cv.n_folds = j.at("n_folds");
    cv.seed = j.at("seed");
    cv.rows = j.at("rows").get<std::vector<std::size_t>>();
    cv.folds = j.at("folds").get<std::vector<int>>();
    auto set = [](const nlohmann::json& e) {
      SetResult s;
      s.name = e.at("name");
      s.features = e.at("features").get<std::vector<std::string>>();
      s.auc = e.at("AUC").get<std::vector<double>>();
      s.ks = e.at("KS").get<std::vector<double>>();
      return s;
    };
    cv.bench = set(j.at("bench"));
    for (const auto& e : j.at("sets")) cv.sets.push_back(set(e));
    return cv;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed cross-validation record: ") + e.what());
  }
}

}  // namespace graphscore::evaluation
