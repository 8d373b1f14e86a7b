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

#include "graphscore/egofeat.h"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "graphscore/netstats.h"
#include "graphscore/parallel.h"

namespace graphscore::egofeat {

std::string_view to_string(EdgeSubset s) {
  switch (s) {
    case EdgeSubset::Full: return "Full";
    case EdgeSubset::NotBridge: return "NotBridge";
    case EdgeSubset::IsBridge: return "IsBridge";
  }
  return "?";
}

std::string_view to_string(Aggregation a) {
  return a == Aggregation::Mean ? "MEAN" : "STD";
}

std::string feature_name(std::string_view network, const EgoAggregationSpec& spec) {
  std::string name = fmt::format("{}Ego{}_NET_{}_{}", network, to_string(spec.subset),
                                 to_string(spec.aggregation), spec.attribute);
  if (spec.weight_by) name += "_Wby_" + *spec.weight_by;
  return name;
}

std::string has_neighbors_name(std::string_view network, EdgeSubset subset) {
  return fmt::format("{}Ego{}_NET_HAS_NEIGHBORS", network, to_string(subset));
}

std::vector<EgoAggregationSpec> default_spec_grid(const std::vector<std::string>& attributes,
                                                  const std::vector<std::string>& weights) {
  std::vector<std::optional<std::string>> weight_options{std::nullopt};
  for (const auto& w : weights) weight_options.emplace_back(w);
  std::vector<EgoAggregationSpec> out;
  for (EdgeSubset s : {EdgeSubset::Full, EdgeSubset::NotBridge, EdgeSubset::IsBridge})
    for (const auto& w : weight_options)
      for (Aggregation a : {Aggregation::Mean, Aggregation::Std})
        for (const auto& attr : attributes) out.push_back({attr, s, a, w});
  return out;
}

namespace {

// Where a named value lives.
struct Source {
  bool from_stats = false;
  std::size_t index = 0;
};

Source resolve(const std::string& name, const std::string& network,
               const NodeAttributeTable& attrs, const FeatureFrame& stats) {
  if (auto i = attrs.attribute_index(name)) return {false, *i};
  if (auto c = stats.column_index(name)) return {true, *c};
  if (auto c = stats.column_index(netstats::column_name(name, network))) return {true, *c};
  throw ConfigError(fmt::format("egonet: unknown attribute '{}' for network {}", name, network));
}

double lookup(const Source& src, const std::string& entity, Period p,
              const NodeAttributeTable& attrs, const FeatureFrame& stats) {
  if (src.from_stats) {
    auto row = stats.find(entity, p);
    return row ? stats.at(*row, src.index) : kMissing;
  }
  auto row = attrs.find(entity, p);
  if (!row && p != kStaticPeriod) row = attrs.find(entity, kStaticPeriod);
  return row ? attrs.value(*row, src.index) : kMissing;
}

bool in_subset(EdgeSubset s, bool is_bridge) {
  switch (s) {
    case EdgeSubset::Full: return true;
    case EdgeSubset::NotBridge: return !is_bridge;
    case EdgeSubset::IsBridge: return is_bridge;
  }
  return false;
}

}  // namespace

FeatureFrame egonet_features(const TemporalNetwork& net, const NodeAttributeTable& attrs,
                             const FeatureFrame& stats,
                             const std::vector<EgoAggregationSpec>& specs,
                             const EgoOptions& options) {
  // Distinct value sources (attributes and weights) in first-use order.
  std::vector<Source> sources;
  std::map<std::string, std::size_t> source_slot;
  auto slot_for = [&](const std::string& name) {
    auto it = source_slot.find(name);
    if (it != source_slot.end()) return it->second;
    sources.push_back(resolve(name, net.name, attrs, stats));
    return source_slot[name] = sources.size() - 1;
  };
  struct Plan {
    std::size_t value = 0;
    std::optional<std::size_t> weight;
  };
  std::vector<Plan> plans;
  bool subset_used[3] = {false, false, false};
  for (const auto& s : specs) {
    Plan p{slot_for(s.attribute), std::nullopt};
    if (s.weight_by) p.weight = slot_for(*s.weight_by);
    plans.push_back(p);
    subset_used[static_cast<int>(s.subset)] = true;
  }

  FeatureFrame frame;
  for (const auto& s : specs) frame.add_column(feature_name(net.name, s), FeatureGroup::D);
  std::size_t indicator_col[3] = {0, 0, 0};
  for (int s = 0; s < 3; ++s)
    if (subset_used[s])
      indicator_col[s] = frame.add_column(
          has_neighbors_name(net.name, static_cast<EdgeSubset>(s)), FeatureGroup::D,
          kStaticPeriod, 0.0);

  std::vector<RowKey> keys = options.keys;
  if (keys.empty())
    for (std::size_t r = 0; r < attrs.num_rows(); ++r) keys.push_back(attrs.key(r));

  // Group requested rows by period so each snapshot is prepared once.
  std::map<Period, std::vector<RowKey>> by_period;
  for (const auto& k : keys) by_period[k.period].push_back(k);

  std::map<const Graph*, std::vector<std::uint8_t>> bridge_cache;
  for (const auto& [period, period_keys] : by_period) {
    const Graph* g = net.snapshot(period);
    if (!g) continue;
    auto [bit, inserted] = bridge_cache.try_emplace(g);
    if (inserted) bit->second = netstats::bridges(*g);
    const auto& is_bridge = bit->second;

    // Node-indexed values of each source at this period.
    const std::size_t n = g->num_nodes();
    std::vector<std::vector<double>> values(sources.size(), std::vector<double>(n));
    parallel_for(sources.size(), options.jobs, [&](std::size_t s) {
      for (NodeIndex v = 0; v < n; ++v)
        values[s][v] = lookup(sources[s], g->id(v), period, attrs, stats);
    });

    std::vector<std::optional<NodeIndex>> nodes;
    std::vector<std::size_t> rows;
    for (const auto& k : period_keys) {
      auto v = g->find(k.entity);
      if (!v) continue;
      if (frame.find_exact(k)) continue;
      rows.push_back(frame.add_row(k));
      nodes.push_back(v);
    }

    parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
      const NodeIndex v = *nodes[i];
      const std::size_t row = rows[i];
      const auto nbrs = g->neighbors(v);
      for (int s = 0; s < 3; ++s) {
        if (!subset_used[s]) continue;
        bool any = false;
        for (const auto& nb : nbrs)
          if (in_subset(static_cast<EdgeSubset>(s), is_bridge[nb.edge])) {
            any = true;
            break;
          }
        frame.set(row, indicator_col[s], any ? 1.0 : 0.0);
      }
      for (std::size_t c = 0; c < specs.size(); ++c) {
        const auto& spec = specs[c];
        const auto& x = values[plans[c].value];
        const std::vector<double>* w = plans[c].weight ? &values[*plans[c].weight] : nullptr;
        double sw = 0.0, swx = 0.0;
        for (const auto& nb : nbrs) {
          if (!in_subset(spec.subset, is_bridge[nb.edge])) continue;
          const double xv = x[nb.node];
          if (is_missing(xv)) continue;
          double wv = 1.0;
          if (w) {
            wv = (*w)[nb.node];
            if (is_missing(wv)) continue;
            if (wv < 0)
              throw ConfigError(fmt::format("egonet: negative weight {} in '{}' for {}", wv,
                                            *spec.weight_by, g->id(nb.node)));
          }
          sw += wv;
          swx += wv * xv;
        }
        double result = kMissing;
        if (sw > 0) {
          const double mean = swx / sw;
          if (spec.aggregation == Aggregation::Mean) {
            result = mean;
          } else {
            double ss = 0.0;
            for (const auto& nb : nbrs) {
              if (!in_subset(spec.subset, is_bridge[nb.edge])) continue;
              const double xv = x[nb.node];
              if (is_missing(xv)) continue;
              const double wv = w ? (*w)[nb.node] : 1.0;
              if (is_missing(wv)) continue;
              ss += wv * (xv - mean) * (xv - mean);
            }
            result = std::sqrt(ss / sw);
          }
        }
        frame.set(row, c, result);
      }
    });
  }
  return frame;
}

}  // namespace graphscore::egofeat
