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

#include "graphscore/study.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "graphscore/csv.h"
#include "graphscore/egofeat.h"
#include "graphscore/explain.h"
#include "graphscore/manifest.h"
#include "graphscore/metrics.h"
#include "graphscore/random.h"

extern char** environ;

namespace graphscore::study {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kFamilyName = "FamilyNet";
constexpr const char* kEowName = "EOWNET";

ordered_json synth_json(const synth::SynthConfig& s) {
  return {{"n_people", s.n_people},
          {"n_companies", s.n_companies},
          {"periods", s.periods},
          {"beta", s.beta},
          {"entry_rate", s.entry_rate},
          {"initial_banked", s.initial_banked},
          {"benchmark_noise", s.benchmark_noise},
          {"thin_file_noise", s.thin_file_noise},
          {"own_effect", s.own_effect},
          {"idiosyncratic_sd", s.idiosyncratic_sd},
          {"influence_gain", s.influence_gain},
          {"influence_scale", s.influence_scale},
          {"attribute_loading", s.attribute_loading},
          {"missing_rate", s.missing_rate},
          {"employment_rate", s.employment_rate},
          {"churn", s.churn},
          {"roll_30_60", s.roll_30_60},
          {"roll_60_90", s.roll_60_90},
          {"target_prevalence", s.target_prevalence},
          {"min_prevalence", s.min_prevalence},
          {"max_prevalence", s.max_prevalence}};
}

void overlay_at(ordered_json& base, const nlohmann::json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
    ordered_json& slot = base[it.key()];
    if (slot.is_object())
      overlay_at(slot, it.value(), path);
    else
      slot = it.value();
  }
}

template <typename T>
T read(const ordered_json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("config: '{}.{}' has the wrong type", where, key));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed JSON '" + path.string() + "': " + e.what());
  }
}

// Appends the columns of `part` (same samples) to `acc`. A column already
// present is skipped when identical (shared presence indicators) and
// rejected otherwise.
void merge_columns(pipeline::LabeledDataset& acc, pipeline::LabeledDataset part) {
  for (std::size_t c = 0; c < part.num_features(); ++c) {
    if (const auto existing = acc.feature_index(part.names[c])) {
      const auto& a = acc.columns[*existing];
      const auto& b = part.columns[c];
      const bool same = std::equal(a.begin(), a.end(), b.begin(), b.end(), [](double x, double y) {
        return x == y || (is_missing(x) && is_missing(y));
      });
      if (!same) throw ConfigError("duplicate feature '" + part.names[c] + "'");
      continue;
    }
    acc.names.push_back(std::move(part.names[c]));
    acc.groups.push_back(part.groups[c]);
    acc.columns.push_back(std::move(part.columns[c]));
    acc.provenance.push_back(std::move(part.provenance[c]));
  }
}

}  // namespace

nlohmann::ordered_json default_config() {
  const synth::SynthConfig s;
  const n2v::N2VConfig n;
  const gnn::GnnConfig g;
  const pipeline::SelectionConfig sel;
  const gbm::GbmParams p;
  return {
      {"seed", 1},
      {"jobs", 1},
      {"out", "graphscore-run"},
      {"input", {{"dir", ""}, {"synth", synth_json(s)}}},
      {"scenario",
       {{"scoring", "Application"},
        {"entity_kind", "Person"},
        {"min_tenure", 6},
        {"max_samples_per_entity", 1}}},
      {"target", {{"horizon", 12}, {"threshold", 90.0}}},
      {"features",
       {{"weighted_degree", false},
        {"ego_stats", true},
        {"ego_weights", {"PageRank"}},
        {"node2vec",
         {{"enabled", true},
          {"dimensions", n.dimensions},
          {"walks_per_node", 4},
          {"walk_length", 20},
          {"window", 3},
          {"p", n.p},
          {"q", n.q},
          {"negatives", 3},
          {"epochs", 1},
          {"learning_rate", n.learning_rate}}},
        {"gnn",
         {{"gcn", true},
          {"gae", true},
          {"models", 8},
          {"hidden", g.hidden},
          {"epochs", g.epochs},
          {"learning_rate", g.learning_rate},
          {"weight_decay", g.weight_decay},
          {"embedding_dim", g.embedding_dim}}}}},
      {"selection",
       {{"ks_min", sel.ks_min},
        {"auc_min", sel.auc_min},
        {"rho", sel.rho},
        {"ordering", "AUC"},
        {"correlation", "Pearson"}}},
      {"model",
       {{"grid",
         {{"n_trees", {100, 300}},
          {"max_depth", {3, 5}},
          {"shrinkage", {0.05, 0.1}},
          {"min_leaf", {20}}}},
        {"l2", p.l2},
        {"max_bins", p.max_bins},
        {"tuning_fraction", 0.3},
        {"validation_fraction", 0.3},
        {"folds", 10},
        {"stratified", true},
        {"permutation_repeats", 1},
        {"bench_feature", "Bench_Score"},
        {"explain_set", "A+B+C+D+E"}}},
      {"report", {{"alpha", 0.05}, {"top_k", 10}}},
  };
}

void overlay(nlohmann::ordered_json& base, const nlohmann::json& patch) {
  overlay_at(base, patch, "");
}

void apply_env_overrides(nlohmann::ordered_json& cfg,
                         const std::vector<std::pair<std::string, std::string>>& vars) {
  for (const auto& [name, text] : vars) {
    if (name.rfind("GS_", 0) != 0) continue;
    std::string key = name.substr(3);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    ordered_json* slot = &cfg;
    std::string path;
    std::size_t start = 0;
    for (;;) {
      const std::size_t sep = key.find("__", start);
      const std::string part = key.substr(start, sep == std::string::npos ? sep : sep - start);
      path += (path.empty() ? "" : ".") + part;
      if (!slot->is_object() || !slot->contains(part))
        throw ConfigError(fmt::format("{}: unknown config key '{}'", name, path));
      slot = &(*slot)[part];
      if (sep == std::string::npos) break;
      start = sep + 2;
    }
    if (slot->is_object()) throw ConfigError(fmt::format("{}: '{}' is a section", name, path));
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    *slot = value;
  }
}

std::vector<std::pair<std::string, std::string>> environment_overrides() {
  std::vector<std::pair<std::string, std::string>> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.rfind("GS_", 0) != 0) continue;
    out.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::ordered_json load_config(const std::string& path) {
  ordered_json cfg = default_config();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    // Comments are allowed so config files can carry a header.
    const nlohmann::json file = nlohmann::json::parse(in, nullptr, false, true);
    if (file.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
    overlay(cfg, file);
  }
  apply_env_overrides(cfg, environment_overrides());
  return cfg;
}

RunConfig RunConfig::from_json(const nlohmann::ordered_json& j) {
  RunConfig c;
  c.raw = j;
  const auto seed = read<std::int64_t>(j, "seed", "");
  if (seed < 0) throw ConfigError("config: seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  const auto jobs = read<int>(j, "jobs", "");
  if (jobs < 1) throw ConfigError("config: jobs must be at least 1");
  c.jobs = static_cast<unsigned>(jobs);
  c.out = read<std::string>(j, "out", "");
  if (c.out.empty()) throw ConfigError("config: out must name a directory");

  const auto& in = j.at("input");
  c.input_dir = read<std::string>(in, "dir", "input");
  if (!c.input_dir.empty()) {
    for (const char* f : kInputFiles)
      if (!fs::exists(fs::path(c.input_dir) / f))
        throw ConfigError(fmt::format("input: '{}' has no {}", c.input_dir, f));
  }
  const auto& s = in.at("synth");
  const std::string sw = "input.synth";
  c.synth.n_people = read<int>(s, "n_people", sw);
  c.synth.n_companies = read<int>(s, "n_companies", sw);
  c.synth.periods = read<int>(s, "periods", sw);
  c.synth.beta = read<double>(s, "beta", sw);
  c.synth.entry_rate = read<double>(s, "entry_rate", sw);
  c.synth.initial_banked = read<double>(s, "initial_banked", sw);
  c.synth.benchmark_noise = read<double>(s, "benchmark_noise", sw);
  c.synth.thin_file_noise = read<double>(s, "thin_file_noise", sw);
  c.synth.own_effect = read<double>(s, "own_effect", sw);
  c.synth.idiosyncratic_sd = read<double>(s, "idiosyncratic_sd", sw);
  c.synth.influence_gain = read<double>(s, "influence_gain", sw);
  c.synth.influence_scale = read<double>(s, "influence_scale", sw);
  c.synth.attribute_loading = read<double>(s, "attribute_loading", sw);
  c.synth.missing_rate = read<double>(s, "missing_rate", sw);
  c.synth.employment_rate = read<double>(s, "employment_rate", sw);
  c.synth.churn = read<double>(s, "churn", sw);
  c.synth.roll_30_60 = read<double>(s, "roll_30_60", sw);
  c.synth.roll_60_90 = read<double>(s, "roll_60_90", sw);
  c.synth.target_prevalence = read<double>(s, "target_prevalence", sw);
  c.synth.min_prevalence = read<double>(s, "min_prevalence", sw);
  c.synth.max_prevalence = read<double>(s, "max_prevalence", sw);
  c.synth.seed = derive_seed(c.seed, {kSynthSeed});
  c.synth.validate();

  const auto& sc = j.at("scenario");
  try {
    c.scenario.scoring = pipeline::scoring_kind_from_string(read<std::string>(sc, "scoring", "scenario"));
    c.scenario.entity_kind = entity_kind_from_string(read<std::string>(sc, "entity_kind", "scenario"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: scenario: ") + e.what());
  }
  c.scenario.min_tenure = read<int>(sc, "min_tenure", "scenario");
  c.scenario.max_samples_per_entity = read<int>(sc, "max_samples_per_entity", "scenario");
  if (c.scenario.min_tenure < 0 || c.scenario.max_samples_per_entity < 0)
    throw ConfigError("config: scenario counts must be non-negative");
  c.scenario.seed = derive_seed(c.seed, {kSamplingSeed});

  const auto& t = j.at("target");
  c.target.horizon = read<int>(t, "horizon", "target");
  c.target.threshold = read<double>(t, "threshold", "target");
  if (c.target.horizon < 1) throw ConfigError("config: target horizon must be positive");

  const auto& f = j.at("features");
  c.features.stats.weighted_degree = read<bool>(f, "weighted_degree", "features");
  c.features.ego_stats = read<bool>(f, "ego_stats", "features");
  c.features.ego_weights = read<std::vector<std::string>>(f, "ego_weights", "features");
  const auto& nv = f.at("node2vec");
  const std::string nw = "features.node2vec";
  c.features.node2vec = read<bool>(nv, "enabled", nw);
  c.features.n2v.dimensions = read<int>(nv, "dimensions", nw);
  c.features.n2v.walks_per_node = read<int>(nv, "walks_per_node", nw);
  c.features.n2v.walk_length = read<int>(nv, "walk_length", nw);
  c.features.n2v.window = read<int>(nv, "window", nw);
  c.features.n2v.p = read<double>(nv, "p", nw);
  c.features.n2v.q = read<double>(nv, "q", nw);
  c.features.n2v.negatives = read<int>(nv, "negatives", nw);
  c.features.n2v.epochs = read<int>(nv, "epochs", nw);
  c.features.n2v.learning_rate = read<double>(nv, "learning_rate", nw);
  c.features.n2v.jobs = c.jobs;
  c.features.n2v.validate();
  const auto& gn = f.at("gnn");
  const std::string gw = "features.gnn";
  c.features.gcn = read<bool>(gn, "gcn", gw);
  c.features.gae = read<bool>(gn, "gae", gw);
  c.features.gnn_models = read<std::size_t>(gn, "models", gw);
  c.features.gnn.hidden = read<int>(gn, "hidden", gw);
  c.features.gnn.epochs = read<int>(gn, "epochs", gw);
  c.features.gnn.learning_rate = read<double>(gn, "learning_rate", gw);
  c.features.gnn.weight_decay = read<double>(gn, "weight_decay", gw);
  c.features.gnn.embedding_dim = read<int>(gn, "embedding_dim", gw);
  c.features.gnn.validate();

  auto& e = c.evaluation;
  const auto& sl = j.at("selection");
  e.selection.ks_min = read<double>(sl, "ks_min", "selection");
  e.selection.auc_min = read<double>(sl, "auc_min", "selection");
  e.selection.rho = read<double>(sl, "rho", "selection");
  const auto ordering = read<std::string>(sl, "ordering", "selection");
  if (ordering != "AUC" && ordering != "KS")
    throw ConfigError("config: selection.ordering must be AUC or KS");
  e.selection.ordering = ordering == "AUC" ? pipeline::Ordering::Auc : pipeline::Ordering::Ks;
  const auto corr = read<std::string>(sl, "correlation", "selection");
  if (corr != "Pearson" && corr != "Spearman")
    throw ConfigError("config: selection.correlation must be Pearson or Spearman");
  e.selection.correlation =
      corr == "Pearson" ? pipeline::Correlation::Pearson : pipeline::Correlation::Spearman;
  e.selection.jobs = c.jobs;

  const auto& m = j.at("model");
  const auto& grid = m.at("grid");
  e.grid.n_trees = read<std::vector<int>>(grid, "n_trees", "model.grid");
  e.grid.max_depth = read<std::vector<int>>(grid, "max_depth", "model.grid");
  e.grid.shrinkage = read<std::vector<double>>(grid, "shrinkage", "model.grid");
  e.grid.min_leaf = read<std::vector<int>>(grid, "min_leaf", "model.grid");
  e.base.l2 = read<double>(m, "l2", "model");
  e.base.max_bins = read<int>(m, "max_bins", "model");
  e.tuning_fraction = read<double>(m, "tuning_fraction", "model");
  e.validation_fraction = read<double>(m, "validation_fraction", "model");
  e.n_folds = read<int>(m, "folds", "model");
  e.stratified = read<bool>(m, "stratified", "model");
  e.permutation_repeats = read<int>(m, "permutation_repeats", "model");
  e.bench_feature = read<std::string>(m, "bench_feature", "model");
  e.explain_set = read<std::string>(m, "explain_set", "model");
  e.seed = derive_seed(c.seed, {kEvaluationSeed});
  e.jobs = c.jobs;
  try {
    e.validate();
    e.grid.expand(e.base);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(std::string("config: model: ") + err.what());
  }

  const auto& r = j.at("report");
  c.alpha = read<double>(r, "alpha", "report");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("config: report.alpha must lie in (0, 1)");
  c.top_k = read<std::size_t>(r, "top_k", "report");
  return c;
}

StudyInputs load_inputs(const std::string& dir) {
  const fs::path root(dir);
  StudyInputs in;
  in.family = load_edge_list((root / kInputFiles[0]).string());
  in.family.name = kFamilyName;
  in.eow = load_edge_list((root / kInputFiles[1]).string());
  in.eow.name = kEowName;
  in.attributes = load_node_attributes((root / kInputFiles[2]).string());
  in.labels = load_labels((root / kInputFiles[3]).string());
  in.kinds = load_entity_kinds((root / kInputFiles[4]).string());
  return in;
}

std::vector<int> node_classes(const Graph& g, const LabelTable& labels, Period p,
                              double threshold) {
  std::vector<int> out(g.num_nodes());
  for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
    const LabelRecord* r = labels.find(g.id(v), p);
    out[v] = !r ? 2 : (r->days_past_due_max >= threshold ? 0 : 1);
  }
  return out;
}

FeatureBuild build_features(const StudyInputs& in, const pipeline::ScenarioSpec& scenario,
                            const TargetSpec& target, const FeatureConfig& cfg,
                            std::uint64_t seed, unsigned jobs) {
  FeatureBuild b;
  auto samples = pipeline::select_samples(in.labels, in.kinds, scenario, target, &b.sampling);
  if (samples.empty()) throw EmptyInputError("the scenario selects no samples");
  std::set<Period> period_set;
  std::vector<RowKey> keys;
  for (const auto& s : samples) {
    period_set.insert(s.key.period);
    keys.push_back(s.key);
  }
  const std::vector<Period> periods(period_set.begin(), period_set.end());
  const Period fit_period = in.labels.first_period();

  auto add = [&](const FeatureFrame& frame) {
    merge_columns(b.dataset, pipeline::assemble_dataset(samples, {&frame}));
  };
  b.dataset = pipeline::assemble_dataset(samples, {});
  add(pipeline::attribute_frame(in.attributes));

  std::vector<std::string> ego_attributes = in.attributes.names();
  if (cfg.ego_stats)
    for (const auto& s : netstats::statistic_names(cfg.stats.weighted_degree))
      ego_attributes.push_back(s);
  const auto specs = egofeat::default_spec_grid(ego_attributes, cfg.ego_weights);

  for (const TemporalNetwork* net : {&in.family, &in.eow}) {
    const std::uint64_t net_tag = fnv1a(net->name);
    {
      const FeatureFrame stats = netstats::node_stats_frame(*net, cfg.stats, periods);
      add(stats);
      add(egofeat::egonet_features(*net, in.attributes, stats, specs, {keys, jobs}));
    }
    if (cfg.node2vec) {
      n2v::N2VConfig nc = cfg.n2v;
      nc.seed = derive_seed(seed, {net_tag, 1});
      nc.jobs = jobs;
      add(n2v::n2v_frame(*net, nc, periods));
    }
    const Graph* g = net->snapshot(fit_period);
    if (!g || g->num_nodes() == 0 || !(cfg.gcn || cfg.gae)) continue;
    const auto classes = node_classes(*g, in.labels, fit_period, target.threshold);
    for (const auto& spec : gnn::gnn_model_grid(in.attributes.names(), cfg.gnn_models)) {
      const std::size_t a = *in.attributes.attribute_index(spec.attribute);
      const auto norm = gnn::fit_normalization(*g, fit_period, in.attributes, a);
      const auto x = gnn::node_inputs(*g, fit_period, in.attributes, a, norm);
      for (gnn::ModelKind kind : {gnn::ModelKind::Gcn, gnn::ModelKind::Gae}) {
        if ((kind == gnn::ModelKind::Gcn && !cfg.gcn) || (kind == gnn::ModelKind::Gae && !cfg.gae))
          continue;
        gnn::GnnConfig gc = cfg.gnn;
        gc.seed = derive_seed(seed, {net_tag, fnv1a(spec.attribute), static_cast<std::uint64_t>(kind) + 2});
        gnn::GnnModel model = kind == gnn::ModelKind::Gcn ? gnn::train_gcn(*g, x, classes, gc)
                                                          : gnn::train_gae(*g, x, gc);
        model.attribute = spec.attribute;
        model.model_id = spec.id;
        model.network = net->name;
        model.trained_period = fit_period;
        model.normalization = norm;
        add(gnn::model_frame(model, *net, in.attributes, periods, jobs));
        b.models.push_back(std::move(model));
      }
    }
  }
  b.leakage = pipeline::audit_provenance(b.dataset);
  return b;
}

void write_labeled_dataset(const pipeline::LabeledDataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  {
    CsvWriter w((fs::path(dir) / "columns.csv").string());
    w.row({"feature", "group"});
    for (std::size_t c = 0; c < ds.num_features(); ++c)
      w.row({ds.names[c], std::string(to_string(ds.groups[c]))});
    w.close();
  }
  CsvWriter w((fs::path(dir) / "dataset.csv").string());
  std::vector<std::string> row = {"entity", "period", "target"};
  row.insert(row.end(), ds.names.begin(), ds.names.end());
  w.row(row);
  for (std::size_t i = 0; i < ds.num_rows(); ++i) {
    row.clear();
    row.push_back(ds.samples[i].key.entity);
    row.push_back(std::to_string(ds.samples[i].key.period));
    row.push_back(std::to_string(ds.samples[i].target));
    for (const auto& col : ds.columns) row.push_back(format_number(col[i]));
    w.row(row);
  }
  w.close();
}

pipeline::LabeledDataset read_labeled_dataset(const std::string& dir) {
  pipeline::LabeledDataset ds;
  {
    CsvReader r((fs::path(dir) / "columns.csv").string());
    const std::size_t fc = r.require_column("feature");
    const std::size_t gc = r.require_column("group");
    std::vector<std::string_view> f;
    while (r.next(f)) {
      ds.names.emplace_back(f[fc]);
      try {
        ds.groups.push_back(feature_group_from_string(f[gc]));
      } catch (const Error& e) {
        r.fail(e.what());
      }
    }
  }
  CsvReader r((fs::path(dir) / "dataset.csv").string());
  const std::size_t ec = r.require_column("entity");
  const std::size_t pc = r.require_column("period");
  const std::size_t tc = r.require_column("target");
  std::vector<std::size_t> cols;
  for (const auto& n : ds.names) cols.push_back(r.require_column(n));
  ds.columns.assign(ds.names.size(), {});
  std::vector<std::string_view> f;
  while (r.next(f)) {
    const int target = r.parse_int(f[tc], "target");
    if (target != 0 && target != 1) r.fail("target must be 0 or 1");
    ds.samples.push_back({{std::string(f[ec]), r.parse_int(f[pc], "period")}, target});
    for (std::size_t c = 0; c < cols.size(); ++c)
      ds.columns[c].push_back(r.parse_optional_double(f[cols[c]], ds.names[c]));
  }
  if (ds.samples.empty()) throw EmptyInputError("'" + r.path() + "' has no samples");
  return ds;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Synth: return "synth";
    case Stage::Features: return "features";
    case Stage::Select: return "select";
    case Stage::Train: return "train";
    case Stage::Explain: return "explain";
    case Stage::Report: return "report";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (Stage st : kStages)
    if (to_string(st) == s) return st;
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

std::string_view stage_directory(Stage s) { return s == Stage::Synth ? "data" : to_string(s); }

std::vector<Stage> upstream_of(Stage s) {
  switch (s) {
    case Stage::Synth: return {};
    case Stage::Features: return {Stage::Synth};
    case Stage::Select: return {Stage::Features};
    case Stage::Train: return {Stage::Features, Stage::Select};
    case Stage::Explain: return {Stage::Train};
    case Stage::Report: return {Stage::Train, Stage::Explain};
  }
  return {};
}

std::string stage_hash(const RunConfig& cfg, Stage s) {
  const auto& j = cfg.raw;
  ordered_json section;
  switch (s) {
    case Stage::Synth:
      section = {{"seed", j.at("seed")}, {"input", j.at("input")}};
      break;
    case Stage::Features:
      section = {{"scenario", j.at("scenario")}, {"target", j.at("target")},
                 {"features", j.at("features")}};
      break;
    case Stage::Select:
      section = {{"selection", j.at("selection")},
                 {"tuning_fraction", j.at("model").at("tuning_fraction")}};
      break;
    case Stage::Train:
      section = {{"model", j.at("model")}};
      break;
    case Stage::Explain:
      section = {{"top_k", j.at("report").at("top_k")}};
      break;
    case Stage::Report:
      section = {{"report", j.at("report")}};
      break;
  }
  std::string text = std::string(to_string(s)) + section.dump();
  for (Stage u : upstream_of(s)) text += stage_hash(cfg, u);
  return hex_digest(fnv1a(text));
}

namespace {

struct StageContext {
  const RunConfig& cfg;
  fs::path root;
  fs::path dir;
  std::vector<std::string> outputs;  // relative to dir

  fs::path at(Stage s) const { return root / stage_directory(s); }
  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }
};

void run_synth(StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.input_dir.empty()) {
    for (const char* f : kInputFiles)
      fs::copy_file(fs::path(cfg.input_dir) / f, ctx.file(f), fs::copy_options::overwrite_existing);
    return;
  }
  const synth::SynthData data = synth::generate(cfg.synth);
  synth::write_dataset(data, ctx.dir.string());
  for (const char* f : kInputFiles) ctx.outputs.push_back(f);
  const auto& d = data.diagnostics;
  ordered_json j = {{"seed", cfg.synth.seed},
                    {"alpha", d.alpha},
                    {"prevalence", d.prevalence},
                    {"calibration_attempts", d.calibration_attempts},
                    {"fixed_point_iterations", d.fixed_point_iterations},
                    {"fixed_point_change", d.fixed_point_change},
                    {"observation_points", d.observation_points},
                    {"neighbor_mean_risk_auc", synth::neighbor_mean_risk_auc(data)}};
  write_text(ctx.file("synth.json"), j.dump(2) + "\n");
}

void run_features(StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const StudyInputs in = load_inputs(ctx.at(Stage::Synth).string());
  const FeatureBuild b = build_features(in, cfg.scenario, cfg.target, cfg.features,
                                        derive_seed(cfg.seed, {kFeatureSeed}), cfg.jobs);
  if (!b.leakage.empty()) {
    const auto& v = b.leakage.front();
    throw Error(fmt::format("leakage audit: {} cells draw on later periods (first: feature {} "
                            "at sample {}, provenance {})",
                            b.leakage.size(), b.dataset.names[v.feature],
                            b.dataset.samples[v.sample].key.entity, v.provenance));
  }
  write_labeled_dataset(b.dataset, ctx.dir.string());
  ctx.outputs.push_back("dataset.csv");
  ctx.outputs.push_back("columns.csv");
  fs::create_directories(ctx.dir / "models");
  ordered_json models = ordered_json::array();
  for (const auto& m : b.models) {
    const std::string name = fmt::format("models/{}{}_{}.json",
                                         m.kind == gnn::ModelKind::Gcn ? "CHEB" : "GAE",
                                         m.model_id, m.network);
    gnn::save_model(m, ctx.file(name));
    models.push_back(name);
  }
  std::array<std::size_t, 5> per_group{};
  for (FeatureGroup g : b.dataset.groups) ++per_group[static_cast<std::size_t>(g)];
  std::size_t positives = 0;
  for (const auto& s : b.dataset.samples) positives += static_cast<std::size_t>(s.target);
  const auto& st = b.sampling;
  ordered_json j = {
      {"scenario",
       {{"scoring", pipeline::to_string(cfg.scenario.scoring)},
        {"entity_kind", to_string(cfg.scenario.entity_kind)}}},
      {"samples", b.dataset.num_rows()},
      {"positives", positives},
      {"sampling",
       {{"candidates", st.candidates},
        {"other_kind", st.other_kind},
        {"unknown_kind", st.unknown_kind},
        {"in_default", st.in_default},
        {"incomplete_window", st.incomplete_window},
        {"capped", st.capped}}},
      {"features", b.dataset.num_features()},
      {"features_per_group",
       {{"A", per_group[0]}, {"B", per_group[1]}, {"C", per_group[2]}, {"D", per_group[3]},
        {"E", per_group[4]}}},
      {"leakage_violations", b.leakage.size()},
      {"models", models}};
  write_text(ctx.file("features.json"), j.dump(2) + "\n");
}

void run_select(StageContext& ctx) {
  const auto ds = read_labeled_dataset(ctx.at(Stage::Features).string());
  const auto sel = evaluation::select_on_tuning_slice(ds, ctx.cfg.evaluation);
  pipeline::write_selection_report(sel.selection, ctx.file("selection.csv"));
  ordered_json split = {{"tuning", sel.split.first}, {"evaluation", sel.split.second}};
  write_text(ctx.file("split.json"), split.dump() + "\n");
  ordered_json sets = ordered_json::array();
  for (const auto& s : sel.sets) sets.push_back({{"name", s.name}, {"features", s.features}});
  write_text(ctx.file("sets.json"), sets.dump(2) + "\n");
}

evaluation::SelectionOutcome read_selection(const fs::path& dir) {
  evaluation::SelectionOutcome sel;
  try {
    const auto split = read_json(dir / "split.json");
    sel.split.first = split.at("tuning").get<std::vector<std::size_t>>();
    sel.split.second = split.at("evaluation").get<std::vector<std::size_t>>();
    for (const auto& s : read_json(dir / "sets.json"))
      sel.sets.push_back({s.at("name"), s.at("features").get<std::vector<std::string>>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed selection outputs: ") + e.what());
  }
  return sel;
}

void run_train(StageContext& ctx) {
  const auto ds = read_labeled_dataset(ctx.at(Stage::Features).string());
  const auto sel = read_selection(ctx.at(Stage::Select));
  for (const auto& v : {sel.split.first, sel.split.second})
    for (std::size_t r : v)
      if (r >= ds.num_rows()) throw Error("selection split refers to a row beyond the dataset");
  const auto out = evaluation::validate_sets(ds, sel, ctx.cfg.evaluation);

  write_text(ctx.file("cv.json"), evaluation::cv_to_json(out.cv).dump(2) + "\n");
  ordered_json trials = ordered_json::array();
  for (const auto& t : out.tuning.trials)
    trials.push_back({{"n_trees", t.params.n_trees},
                      {"max_depth", t.params.max_depth},
                      {"shrinkage", t.params.shrinkage},
                      {"min_leaf", t.params.min_leaf},
                      {"auc", t.auc}});
  const auto& b = out.tuning.best;
  ordered_json tuning = {{"best",
                          {{"n_trees", b.n_trees},
                           {"max_depth", b.max_depth},
                           {"shrinkage", b.shrinkage},
                           {"min_leaf", b.min_leaf}}},
                         {"trials", trials}};
  write_text(ctx.file("tuning.json"), tuning.dump(2) + "\n");
  evaluation::write_fold_metrics_csv(out.cv, ctx.file("fold_metrics.csv"));

  const auto& a = *out.cv.attributions;
  {
    CsvWriter w(ctx.file("attribution_columns.csv"));
    w.row({"feature", "group"});
    for (std::size_t c = 0; c < a.cols(); ++c) w.row({a.names[c], std::string(to_string(a.groups[c]))});
    w.close();
  }
  {
    CsvWriter w(ctx.file("attributions.csv"));
    std::vector<std::string> row = {"entity", "period", "base"};
    row.insert(row.end(), a.names.begin(), a.names.end());
    w.row(row);
    for (std::size_t i = 0; i < a.rows; ++i) {
      const auto& key = ds.samples[out.cv.rows[i]].key;
      row = {key.entity, std::to_string(key.period), format_number(a.base[i])};
      for (double v : a.row(i)) row.push_back(format_number(v));
      w.row(row);
    }
    w.close();
  }
  CsvWriter w(ctx.file("permutation.csv"));
  w.row({"feature", "mean_auc_drop"});
  for (const auto& p : out.cv.permutation) w.row({p.name, format_number(p.mean_drop)});
  w.close();
}

explain::AttributionMatrix read_attributions(const fs::path& dir) {
  explain::AttributionMatrix a;
  {
    CsvReader r((dir / "attribution_columns.csv").string());
    const std::size_t fc = r.require_column("feature");
    const std::size_t gc = r.require_column("group");
    std::vector<std::string_view> f;
    while (r.next(f)) {
      a.names.emplace_back(f[fc]);
      a.groups.push_back(feature_group_from_string(f[gc]));
    }
  }
  CsvReader r((dir / "attributions.csv").string());
  const std::size_t bc = r.require_column("base");
  std::vector<std::size_t> cols;
  for (const auto& n : a.names) cols.push_back(r.require_column(n));
  std::vector<std::string_view> f;
  while (r.next(f)) {
    a.base.push_back(r.parse_double(f[bc], "base"));
    for (std::size_t c : cols) a.values.push_back(r.parse_double(f[c], r.header()[c]));
    ++a.rows;
  }
  return a;
}

void run_explain(StageContext& ctx) {
  const fs::path train = ctx.at(Stage::Train);
  const auto a = read_attributions(train);
  const auto report = explain::global_importance(a);
  explain::write_importance_csv(report, ctx.file("importance.csv"));
  explain::write_treemap_json(report, ctx.file("treemap.json"));

  // Rank agreement between mean |attribution| and permutation drop.
  std::map<std::string, double> drop;
  {
    CsvReader r((train / "permutation.csv").string());
    const std::size_t fc = r.require_column("feature");
    const std::size_t dc = r.require_column("mean_auc_drop");
    std::vector<std::string_view> f;
    while (r.next(f)) drop[std::string(f[fc])] = r.parse_double(f[dc], "mean_auc_drop");
  }
  ordered_json j;
  if (!drop.empty()) {
    std::vector<double> shap, perm;
    for (const auto& fi : report.features) {
      shap.push_back(fi.mean_abs);
      perm.push_back(drop.at(fi.name));
    }
    j["spearman_attribution_vs_permutation"] = metrics::spearman(shap, perm);
  }
  ordered_json shares;
  for (FeatureGroup g : {FeatureGroup::A, FeatureGroup::B, FeatureGroup::C, FeatureGroup::D,
                         FeatureGroup::E})
    shares[std::string(to_string(g))] = report.group_share[static_cast<std::size_t>(g)];
  j["group_share"] = shares;
  ordered_json top = ordered_json::array();
  for (const auto& fi : report.top(ctx.cfg.top_k))
    top.push_back({{"feature", fi.name},
                   {"group", to_string(fi.group)},
                   {"mean_abs_attr", fi.mean_abs},
                   {"share", fi.share}});
  j["top"] = top;
  write_text(ctx.file("explain.json"), j.dump(2) + "\n");
}

void run_report(StageContext& ctx) {
  const fs::path train = ctx.at(Stage::Train);
  const fs::path expl = ctx.at(Stage::Explain);
  const auto cv = evaluation::cv_from_json(read_json(train / "cv.json"));
  const auto rows = evaluation::relative_improvement_table(cv, ctx.cfg.alpha);
  evaluation::write_report_csv(rows, ctx.file("report.csv"));
  auto j = evaluation::report_json(cv, rows);
  j["scenario"] = {{"scoring", pipeline::to_string(ctx.cfg.scenario.scoring)},
                   {"entity_kind", to_string(ctx.cfg.scenario.entity_kind)}};
  j["alpha"] = ctx.cfg.alpha;
  j["importance"] = read_json(expl / "explain.json");
  write_text(ctx.file("report.json"), j.dump(2) + "\n");

  std::string md = fmt::format(
      "# Relative improvement over BENCH ({} scoring, {})\n\n"
      "Mean ± SD over {} folds of (set - BENCH) / BENCH. `*`: paired t-test at alpha {} does "
      "not reject equality with BENCH. Bold: best set and sets not significantly different "
      "from it.\n\n",
      pipeline::to_string(ctx.cfg.scenario.scoring), to_string(ctx.cfg.scenario.entity_kind),
      cv.n_folds, ctx.cfg.alpha);
  md += evaluation::report_markdown(rows);
  md += "\n| Group | Share of mean abs attribution |\n|---|---|\n";
  for (const auto& [g, share] : j["importance"]["group_share"].items())
    md += fmt::format("| {} | {:.1f}% |\n", g, 100.0 * share.get<double>());
  write_text(ctx.file("report.md"), md);
  fs::copy_file(expl / "treemap.json", ctx.file("treemap.json"),
                fs::copy_options::overwrite_existing);
  fs::copy_file(train / "fold_metrics.csv", ctx.file("fold_metrics.csv"),
                fs::copy_options::overwrite_existing);
}

}  // namespace

StageStatus run_stage(const RunConfig& cfg, Stage s, const StageOptions& options) {
  StageContext ctx{cfg, fs::path(cfg.out), fs::path(cfg.out) / stage_directory(s), {}};
  const std::string expected = stage_hash(cfg, s);

  std::map<std::string, std::string> upstream;
  for (Stage u : upstream_of(s)) {
    const fs::path dir = ctx.at(u);
    const auto m = read_manifest(dir.string());
    if (!m)
      throw Error(fmt::format("stage '{}' needs the outputs of '{}' in {}; run that stage first",
                              to_string(s), to_string(u), dir.string()));
    std::string problem;
    if (m->config_hash != stage_hash(cfg, u))
      problem = fmt::format("its config hash {} differs from the current configuration's {}",
                            m->config_hash, stage_hash(cfg, u));
    else if (!outputs_intact(*m, dir.string()))
      problem = "its output files changed since it ran";
    if (!problem.empty()) {
      const std::string msg =
          fmt::format("stage '{}' is stale: {} ({}); rerun '{}' or pass --force", to_string(u),
                      problem, dir.string(), to_string(u));
      if (!options.force) throw StaleError(msg);
      spdlog::warn("{}", msg);
    }
    upstream[std::string(to_string(u))] = m->config_hash;
  }

  if (!options.force) {
    if (const auto own = read_manifest(ctx.dir.string());
        own && own->config_hash == expected && own->upstream == upstream &&
        outputs_intact(*own, ctx.dir.string()))
      return StageStatus::UpToDate;
  }

  if (fs::exists(ctx.dir)) fs::remove_all(ctx.dir);
  fs::create_directories(ctx.dir);
  switch (s) {
    case Stage::Synth: run_synth(ctx); break;
    case Stage::Features: run_features(ctx); break;
    case Stage::Select: run_select(ctx); break;
    case Stage::Train: run_train(ctx); break;
    case Stage::Explain: run_explain(ctx); break;
    case Stage::Report: run_report(ctx); break;
  }
  Manifest m;
  m.stage = std::string(to_string(s));
  m.config_hash = expected;
  m.seed = cfg.seed;
  m.upstream = std::move(upstream);
  for (const auto& name : ctx.outputs) m.outputs[name] = file_digest((ctx.dir / name).string());
  write_manifest(m, ctx.dir.string());
  return StageStatus::Ran;
}

void run_all(const RunConfig& cfg, const StageOptions& options,
             const std::function<void(Stage, StageStatus)>& on_stage) {
  for (Stage s : kStages) {
    const StageStatus st = run_stage(cfg, s, options);
    if (on_stage) on_stage(s, st);
  }
}

}  // namespace graphscore::study
