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

#include "graphscore/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "graphscore/metrics.h"
#include "graphscore/random.h"

namespace graphscore::synth {

namespace {

constexpr Period kNever = std::numeric_limits<Period>::max();
constexpr int kThinFilePeriods = 6;
constexpr int kMinInitialTenure = 6;
constexpr int kMaxInitialTenure = 48;
constexpr int kCalibrationAttempts = 20;
constexpr double kCalibrationTolerance = 0.005;
// Logit shift of Bench_Score per delinquency bucket (30, 60, 90 dpd).
constexpr double kBenchDelinquencyShift = 1.5;

// Stream tags for make_rng.
enum Stream : std::uint64_t { kStructure = 1, kLatent, kEntry, kDelinquency, kAttributes };

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double normal(Rng& rng) {
  // Box-Muller on two uniform01 draws keeps streams platform independent.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double prod = uniform01(rng);
  while (prod > limit && k < 1000) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

struct WeightedEdge {
  std::uint32_t u, v;
  double weight;
};

struct Structure {
  std::vector<WeightedEdge> family;
  // Per period, starting at period 1.
  std::vector<std::vector<WeightedEdge>> eow;
  std::vector<char> adult;
};

Structure build_structure(const SynthConfig& cfg) {
  Rng rng = make_rng(cfg.seed, {kStructure});
  const auto np = static_cast<std::uint32_t>(cfg.n_people);
  const auto nc = static_cast<std::uint32_t>(cfg.n_companies);
  Structure s;
  s.adult.assign(np, 0);

  // Households: one or two adults, up to three children linked to every
  // adult, and sometimes a link from an adult to a parent in an earlier
  // household.
  std::vector<std::uint32_t> earlier_adults;
  for (std::uint32_t i = 0; i < np;) {
    const std::uint32_t n_adults = uniform01(rng) < 0.25 ? 1 : 2;
    const double k = uniform01(rng);
    const std::uint32_t n_kids = k < 0.35 ? 0 : k < 0.6 ? 1 : k < 0.85 ? 2 : 3;
    const std::uint32_t size = std::min(n_adults + n_kids, np - i);
    const std::uint32_t adults = std::min(n_adults, size);
    for (std::uint32_t a = 0; a < adults; ++a) s.adult[i + a] = 1;
    if (adults == 2) s.family.push_back({i, i + 1, 1.0});
    for (std::uint32_t c = adults; c < size; ++c)
      for (std::uint32_t a = 0; a < adults; ++a) s.family.push_back({i + a, i + c, 1.0});
    const bool generational = uniform01(rng) < 0.3;
    if (generational && !earlier_adults.empty())
      s.family.push_back({earlier_adults[uniform_index(rng, earlier_adults.size())], i, 1.0});
    for (std::uint32_t a = 0; a < adults; ++a) earlier_adults.push_back(i + a);
    i += size;
  }

  // Company sizes are lognormal; employers are drawn proportionally.
  std::vector<double> size_weight(nc);
  for (auto& w : size_weight) w = std::exp(normal(rng));
  const AliasTable employer_table(size_weight);

  const std::vector<std::uint32_t>& owner_pool = earlier_adults;
  std::vector<std::vector<std::uint32_t>> owners(nc);
  for (std::uint32_t c = 0; c < nc; ++c) {
    const int n_owners = uniform01(rng) < 0.3 ? 2 : 1;
    for (int o = 0; o < n_owners; ++o)
      owners[c].push_back(owner_pool.empty() ? static_cast<std::uint32_t>(uniform_index(rng, np))
                                             : owner_pool[uniform_index(rng, owner_pool.size())]);
  }

  auto employment_rate = [&](std::uint32_t person) {
    return s.adult[person] ? cfg.employment_rate : 0.5 * cfg.employment_rate;
  };
  constexpr std::uint32_t kUnemployed = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> employer(np, kUnemployed);
  for (std::uint32_t p = 0; p < np; ++p)
    if (uniform01(rng) < employment_rate(p))
      employer[p] = static_cast<std::uint32_t>(employer_table.sample(rng));

  auto other_company = [&](std::uint32_t c) {
    auto d = static_cast<std::uint32_t>(uniform_index(rng, nc - 1));
    return d >= c ? d + 1 : d;
  };
  constexpr int kTradeSlots = 2;
  std::vector<std::uint32_t> partner(static_cast<std::size_t>(nc) * kTradeSlots);
  for (std::uint32_t c = 0; c < nc; ++c)
    for (int k = 0; k < kTradeSlots; ++k) partner[c * kTradeSlots + k] = other_company(c);

  s.eow.resize(static_cast<std::size_t>(cfg.periods));
  for (int t = 0; t < cfg.periods; ++t) {
    if (t > 0) {
      for (std::uint32_t p = 0; p < np; ++p) {
        const double rate = employment_rate(p);
        const double move = uniform01(rng);
        const double where = uniform01(rng);
        if (employer[p] != kUnemployed) {
          if (move < cfg.churn)
            employer[p] = where < 0.5 ? kUnemployed
                                      : static_cast<std::uint32_t>(employer_table.sample(rng));
        } else if (move < std::min(1.0, 0.5 * cfg.churn * rate / (1.0 - rate))) {
          employer[p] = static_cast<std::uint32_t>(employer_table.sample(rng));
        }
      }
      for (std::uint32_t c = 0; c < nc; ++c)
        for (int k = 0; k < kTradeSlots; ++k)
          if (uniform01(rng) < cfg.churn) partner[c * kTradeSlots + k] = other_company(c);
    }
    auto& edges = s.eow[static_cast<std::size_t>(t)];
    for (std::uint32_t c = 0; c < nc; ++c)
      for (std::uint32_t o : owners[c]) edges.push_back({o, np + c, 2.0});
    for (std::uint32_t p = 0; p < np; ++p)
      if (employer[p] != kUnemployed) edges.push_back({p, np + employer[p], 1.0});
    for (std::uint32_t c = 0; c < nc; ++c)
      for (int k = 0; k < kTradeSlots; ++k)
        edges.push_back({np + c, np + partner[c * kTradeSlots + k], 1.0});
  }
  return s;
}

// Monthly delinquency states per entity from its entry period on:
// 0 current, 1 = 30, 2 = 60, 3 = 90+ days past due (absorbing).
struct Histories {
  std::vector<std::vector<std::uint8_t>> states;

  std::uint8_t at(std::size_t entity, Period entered, Period t) const {
    return states[entity][static_cast<std::size_t>(t - entered)];
  }
};

Histories simulate(const SynthConfig& cfg, std::span<const Period> entered,
                   std::span<const double> offset, double alpha) {
  const double roll = cfg.roll_30_60 * cfg.roll_60_90;
  Histories h;
  h.states.resize(entered.size());
  for (std::size_t i = 0; i < entered.size(); ++i) {
    if (entered[i] == kNever) continue;
    // Monthly hazard of a new delinquency episode such that, at the given
    // roll rates, twelve periods carry default probability r.
    const double r = sigmoid(alpha + offset[i]);
    const double monthly = 1.0 - std::pow(1.0 - r, 1.0 / 12.0);
    const double q = roll > 0 ? std::min(1.0, monthly / roll) : 1.0;
    Rng rng = make_rng(cfg.seed, {kDelinquency, i});
    auto& states = h.states[i];
    states.assign(static_cast<std::size_t>(cfg.periods - entered[i] + 1), 0);
    for (std::size_t k = 1; k < states.size(); ++k) {
      const double u = uniform01(rng);
      switch (states[k - 1]) {
        case 0: states[k] = u < q ? 1 : 0; break;
        case 1: states[k] = u < cfg.roll_30_60 ? 2 : 0; break;
        case 2: states[k] = u < cfg.roll_60_90 ? 3 : 0; break;
        default: states[k] = 3;
      }
    }
  }
  return h;
}

struct Prevalence {
  double rate = 0.0;
  std::size_t points = 0;
};

Prevalence measure_prevalence(const SynthConfig& cfg, std::span<const Period> entered,
                              const Histories& h) {
  constexpr int kHorizon = 12;
  std::size_t points = 0, defaults = 0;
  for (std::size_t i = 0; i < entered.size(); ++i) {
    if (entered[i] == kNever) continue;
    for (Period t = std::max<Period>(2, entered[i]); t + kHorizon <= cfg.periods; ++t) {
      if (h.at(i, entered[i], t) == 3) break;
      ++points;
      // The default state is absorbing.
      if (h.at(i, entered[i], t + kHorizon) == 3) ++defaults;
    }
  }
  return {points ? static_cast<double>(defaults) / static_cast<double>(points) : 0.0, points};
}

const char* const kAttributeNames[] = {"ATT01", "ATT02", "ATT03", "ATT04", "ATT05",
                                       "ATT06", "ATT07", "ATT08", "ATT09", "ATT10",
                                       "ATT11", "ATT12", "ATT13", "Bench_Score"};

void fill_attributes(const SynthConfig& cfg, std::size_t i, bool person, bool adult,
                     Period entered, double u, double latent, const Histories& h,
                     NodeAttributeTable& table, const std::string& id) {
  Rng rng = make_rng(cfg.seed, {kAttributes, i});
  const double L = cfg.attribute_loading;
  auto has = [&](double p) { return uniform01(rng) < p; };
  const bool consumer = person && has(0.8);
  const bool mortgage = has(person ? (adult ? 0.3 : 0.05) : 0.2);
  const bool revolving = has(person ? 0.6 : 0.7);
  const bool commercial = has(person ? 0.05 : 1.0);
  auto amount = [&](double mu) { return std::exp(mu + L * u + 0.8 * normal(rng)); };
  const double consumer_amt = consumer ? amount(8.0) : 0.0;
  const double mortgage_amt = mortgage ? amount(11.0) : 0.0;
  const double limit = revolving ? amount(8.5) : 0.0;
  const double commercial_amt = commercial ? amount(person ? 9.0 : 11.0) : 0.0;
  const double growth = 0.004 + 0.01 * L * u + 0.005 * normal(rng);
  const int lenders = 1 + poisson(rng, std::exp(-0.5 + L * u));
  const double util_center = -0.6 + 2.0 * L * u;
  const double bench_persistent = normal(rng);

  auto planned_total = [&](int tenure) {
    return (consumer_amt + mortgage_amt + commercial_amt + limit * sigmoid(util_center)) *
           std::exp(growth * tenure);
  };

  std::vector<double> row(std::size(kAttributeNames));
  for (Period t = std::max<Period>(1, entered); t <= cfg.periods; ++t) {
    const int tenure = t - entered;
    const double scale = std::exp(growth * tenure);
    const double util = sigmoid(util_center + 0.4 * normal(rng));
    const double bench_noise = normal(rng);
    const double used = limit * scale * util;
    const double total = (consumer_amt + mortgage_amt + commercial_amt) * scale + used;

    const int state = h.at(i, entered, t);
    int worst6 = 0, delinquent12 = 0;
    for (Period s = std::max(entered, t - 11); s <= t; ++s) {
      const int st = h.at(i, entered, s);
      if (st > 0) ++delinquent12;
      if (s > t - 6) worst6 = std::max(worst6, st);
    }
    const double arrears = state * 0.03 * total;

    row[0] = 30.0 * state;
    row[1] = 30.0 * worst6;
    row[2] = delinquent12;
    row[3] = std::log1p(arrears);
    row[4] = revolving ? limit * scale - used : 0.0;
    row[5] = commercial_amt * scale;
    row[6] = consumer_amt * scale;
    row[7] = mortgage_amt * scale;
    row[8] = lenders;
    row[9] = total > 0 ? arrears / total : 0.0;
    row[10] = std::log((total + 1.0) / (planned_total(std::max(0, tenure - 6)) + 1.0));
    row[11] = revolving ? util : kMissing;
    row[12] = tenure;
    for (int a = 4; a <= 11; ++a)
      if (uniform01(rng) < cfg.missing_rate) row[static_cast<std::size_t>(a)] = kMissing;
    const double sd = tenure < kThinFilePeriods ? cfg.thin_file_noise : cfg.benchmark_noise;
    row[13] = sigmoid(latent + kBenchDelinquencyShift * state +
                      sd * (0.8 * bench_persistent + 0.6 * bench_noise));
    table.add_row(RowKey{id, t}, row);
  }
}

TemporalNetwork make_network(std::string name, std::vector<Period> periods,
                             std::vector<Graph> snapshots) {
  TemporalNetwork net;
  net.name = std::move(name);
  net.periods = std::move(periods);
  net.snapshots = std::move(snapshots);
  std::unordered_map<std::string, char> seen;
  for (const Graph& g : net.snapshots)
    for (const auto& id : g.ids())
      if (seen.try_emplace(id, 1).second) net.entity_ids.push_back(id);
  return net;
}

}  // namespace

void SynthConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(fmt::format("synth: {}", what));
  };
  require(n_people >= 10, "n_people must be at least 10");
  require(n_companies >= 10, "n_companies must be at least 10");
  require(periods >= 13, "periods must be at least 13");
  require(beta >= 0, "beta must be non-negative");
  require(entry_rate >= 0 && entry_rate <= 1, "entry_rate must lie in [0, 1]");
  require(initial_banked >= 0 && initial_banked <= 1, "initial_banked must lie in [0, 1]");
  require(benchmark_noise >= 0 && thin_file_noise >= 0, "benchmark noise must be non-negative");
  require(idiosyncratic_sd >= 0, "idiosyncratic_sd must be non-negative");
  require(influence_gain > 0 && influence_scale > 0, "influence gain and scale must be positive");
  require(missing_rate >= 0 && missing_rate < 1, "missing_rate must lie in [0, 1)");
  require(employment_rate >= 0 && employment_rate < 1, "employment_rate must lie in [0, 1)");
  require(churn >= 0 && churn <= 1, "churn must lie in [0, 1]");
  require(roll_30_60 >= 0 && roll_30_60 <= 1 && roll_60_90 >= 0 && roll_60_90 <= 1,
          "roll rates must lie in [0, 1]");
  require(min_prevalence > 0 && min_prevalence <= target_prevalence &&
              target_prevalence <= max_prevalence && max_prevalence < 1,
          "prevalence band must satisfy 0 < min <= target <= max < 1");
}

FixedPointResult solve_latent_risk(const Graph& ties, std::span<const double> base, double beta,
                                   double gain, double scale, double tol, int max_iter) {
  if (base.size() != ties.num_nodes())
    throw DimensionError("solve_latent_risk: base size differs from node count");
  const std::size_t n = base.size();
  FixedPointResult r;
  r.values.assign(base.begin(), base.end());
  std::vector<double> h(n), next(n);
  while (r.iterations < max_iter) {
    for (std::size_t v = 0; v < n; ++v) h[v] = gain * scale * std::tanh(r.values[v] / (2.0 * scale));
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const auto nb = ties.neighbors(static_cast<NodeIndex>(v));
      double sum = 0.0;
      for (const auto& w : nb) sum += h[w.node];
      next[v] = base[v] + (nb.empty() ? 0.0 : beta * sum / static_cast<double>(nb.size()));
      change = std::max(change, std::abs(next[v] - r.values[v]));
    }
    r.values.swap(next);
    ++r.iterations;
    r.last_change = change;
    if (change < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto np = static_cast<std::size_t>(cfg.n_people);
  const auto nc = static_cast<std::size_t>(cfg.n_companies);
  const std::size_t n = np + nc;

  SynthData data;
  data.entities.reserve(n);
  for (std::size_t i = 0; i < np; ++i)
    data.entities.emplace_back(fmt::format("P{:05d}", i + 1), EntityKind::Person);
  for (std::size_t c = 0; c < nc; ++c)
    data.entities.emplace_back(fmt::format("C{:04d}", c + 1), EntityKind::Business);
  auto id = [&](std::uint32_t i) -> const std::string& { return data.entities[i].first; };

  const Structure s = build_structure(cfg);
  {
    GraphBuilder b;
    for (std::size_t i = 0; i < np; ++i) b.add_node(id(static_cast<std::uint32_t>(i)));
    for (const auto& e : s.family) b.add_edge(e.u, e.v, e.weight);
    std::vector<Graph> snaps;
    snaps.push_back(std::move(b).build());
    data.family = make_network("FamilyNet", {kStaticPeriod}, std::move(snaps));
  }
  {
    std::vector<Graph> snaps;
    std::vector<Period> periods;
    for (int t = 0; t < cfg.periods; ++t) {
      GraphBuilder b;
      for (std::size_t c = 0; c < nc; ++c) b.add_node(id(static_cast<std::uint32_t>(np + c)));
      for (const auto& e : s.eow[static_cast<std::size_t>(t)]) b.add_edge(id(e.u), id(e.v), e.weight);
      snaps.push_back(std::move(b).build());
      periods.push_back(t + 1);
    }
    data.eow = make_network("EOWNET", std::move(periods), std::move(snaps));
  }
  {
    GraphBuilder b;
    for (std::size_t i = 0; i < n; ++i) b.add_node(id(static_cast<std::uint32_t>(i)));
    for (const auto& e : s.family) b.add_edge(e.u, e.v, 1.0);
    for (const auto& period : s.eow)
      for (const auto& e : period) b.add_edge(e.u, e.v, 1.0);
    data.ties = std::move(b).build();
  }

  Rng latent_rng = make_rng(cfg.seed, {kLatent});
  std::vector<double> u(n), base(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = normal(latent_rng);
    base[i] = cfg.own_effect * u[i] + cfg.idiosyncratic_sd * normal(latent_rng);
  }
  const FixedPointResult fp = solve_latent_risk(data.ties, base, cfg.beta, cfg.influence_gain,
                                                cfg.influence_scale, 1e-10, 2000);
  if (!fp.converged)
    throw ConfigError(fmt::format("synth: latent risk did not converge (beta {})", cfg.beta));
  data.diagnostics.fixed_point_iterations = fp.iterations;
  data.diagnostics.fixed_point_change = fp.last_change;

  Rng entry_rng = make_rng(cfg.seed, {kEntry});
  std::vector<Period> entered(n, kNever);
  for (std::size_t i = 0; i < n; ++i) {
    const double banked = uniform01(entry_rng);
    const double tenure = uniform01(entry_rng);
    if (banked < cfg.initial_banked) {
      const int span = kMaxInitialTenure - kMinInitialTenure + 1;
      entered[i] = 1 - (kMinInitialTenure + static_cast<int>(tenure * span));
      continue;
    }
    for (Period t = 2; t <= cfg.periods; ++t)
      if (uniform01(entry_rng) < cfg.entry_rate) {
        entered[i] = t;
        break;
      }
  }

  // The latent offsets do not depend on alpha, so calibration only replays
  // the delinquency process with common random numbers.
  double alpha = logit(cfg.target_prevalence);
  double best_alpha = alpha, best_gap = std::numeric_limits<double>::infinity();
  Prevalence best{};
  int attempts = 0;
  while (attempts < kCalibrationAttempts) {
    ++attempts;
    const Prevalence prev = measure_prevalence(cfg, entered, simulate(cfg, entered, fp.values, alpha));
    const double gap = std::abs(prev.rate - cfg.target_prevalence);
    if (gap < best_gap) {
      best_gap = gap;
      best_alpha = alpha;
      best = prev;
    }
    if (gap <= kCalibrationTolerance) break;
    const double clamped = std::clamp(prev.rate, 1e-4, 1.0 - 1e-4);
    alpha += logit(cfg.target_prevalence) - logit(clamped);
  }
  if (!(best.rate >= cfg.min_prevalence && best.rate <= cfg.max_prevalence))
    throw ConfigError(fmt::format(
        "synth: default prevalence {:.4f} outside [{}, {}] after {} calibration attempts",
        best.rate, cfg.min_prevalence, cfg.max_prevalence, attempts));
  data.diagnostics.alpha = best_alpha;
  data.diagnostics.prevalence = best.rate;
  data.diagnostics.calibration_attempts = attempts;
  data.diagnostics.observation_points = best.points;

  const Histories h = simulate(cfg, entered, fp.values, best_alpha);
  data.latent.resize(n);
  for (std::size_t i = 0; i < n; ++i) data.latent[i] = best_alpha + fp.values[i];

  data.attributes = NodeAttributeTable(
      std::vector<std::string>(std::begin(kAttributeNames), std::end(kAttributeNames)));
  for (std::size_t i = 0; i < n; ++i) {
    if (entered[i] == kNever) continue;
    for (Period t = std::max<Period>(1, entered[i]); t <= cfg.periods; ++t)
      data.labels.add({id(static_cast<std::uint32_t>(i)), t, 30.0 * h.at(i, entered[i], t),
                       entered[i]});
    const bool person = i < np;
    fill_attributes(cfg, i, person, person && s.adult[i], entered[i], u[i], data.latent[i], h,
                    data.attributes, id(static_cast<std::uint32_t>(i)));
  }
  spdlog::debug("synth: alpha {:.4f} prevalence {:.4f} after {} attempts", best_alpha, best.rate,
                attempts);
  return data;
}

void write_dataset(const SynthData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  write_edge_list(data.family, (root / "family_edges.csv").string());
  write_edge_list(data.eow, (root / "eow_edges.csv").string());
  write_node_attributes(data.attributes, (root / "attributes.csv").string());
  write_labels(data.labels, (root / "labels.csv").string());
  write_entity_kinds(data.entities, (root / "entities.csv").string());
}

std::vector<Observation> observation_points(const SynthData& data, const TargetSpec& spec) {
  std::vector<Observation> out;
  const Period first = data.labels.first_period();
  for (std::size_t i = 0; i < data.entities.size(); ++i) {
    const std::string& e = data.entities[i].first;
    const auto entered = data.labels.entered_period(e);
    if (!entered) continue;
    for (Period t = std::max(first + 1, *entered); t + spec.horizon <= data.labels.last_period();
         ++t) {
      const LabelRecord* row = data.labels.find(e, t);
      if (!row || row->days_past_due_max >= spec.threshold) continue;
      const auto target = default_target(data.labels, e, t, spec);
      if (target) out.push_back({i, t, *target});
    }
  }
  return out;
}

double neighbor_mean_risk_auc(const SynthData& data, const TargetSpec& spec) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const Observation& o : observation_points(data, spec)) {
    const auto nb = data.ties.neighbors(static_cast<NodeIndex>(o.entity));
    if (nb.empty()) continue;
    double sum = 0.0;
    for (const auto& w : nb) sum += sigmoid(data.latent[w.node]);
    scores.push_back(sum / static_cast<double>(nb.size()));
    labels.push_back(o.target);
  }
  return metrics::auc(scores, labels);
}

}  // namespace graphscore::synth
