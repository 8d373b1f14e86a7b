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

#include "graphscore/gbm.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "graphscore/random.h"

namespace graphscore::gbm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Per feature: cut points and a bin code per row. Code 0 is the missing bin;
// code b >= 1 holds values in (cuts[b-2], cuts[b-1]].
struct BinnedData {
  std::size_t rows = 0;
  std::vector<std::vector<double>> cuts;
  std::vector<std::uint16_t> codes;  // column-major
  std::size_t max_codes = 0;

  std::uint16_t code(std::size_t f, std::size_t r) const { return codes[f * rows + r]; }
  std::size_t num_codes(std::size_t f) const { return cuts[f].size() + 2; }
};

BinnedData bin(const pipeline::DesignMatrix& m, int max_bins) {
  BinnedData b;
  b.rows = m.rows;
  b.cuts.resize(m.cols());
  b.codes.resize(m.cols() * m.rows);
  std::vector<double> sorted;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    const auto col = m.column(f);
    sorted.clear();
    for (double v : col)
      if (!is_missing(v)) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(distinct));
    auto& cuts = b.cuts[f];
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
      if (!distinct.empty()) cuts.assign(distinct.begin(), distinct.end() - 1);
    } else {
      for (int q = 1; q < max_bins; ++q) {
        const auto idx = static_cast<std::size_t>(static_cast<double>(q) *
                                                  static_cast<double>(sorted.size()) / max_bins);
        const double c = sorted[std::min(idx, sorted.size() - 1)];
        if (c < distinct.back() && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
      }
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double v = col[r];
      b.codes[f * m.rows + r] =
          is_missing(v) ? 0
                        : static_cast<std::uint16_t>(
                              1 + (std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin()));
    }
    b.max_codes = std::max(b.max_codes, b.num_codes(f));
  }
  return b;
}

struct Bucket {
  double g = 0, h = 0, n = 0;
  void add(const Bucket& o) { g += o.g, h += o.h, n += o.n; }
  void sub(const Bucket& o) { g -= o.g, h -= o.h, n -= o.n; }
};

// Histogram over all features, laid out feature-major with max_codes slots.
using Histogram = std::vector<Bucket>;

struct Split {
  double gain = 0.0;
  int feature = -1;
  std::size_t code = 0;  // last non-missing code on the left
  bool missing_left = true;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedData& data, const std::vector<double>& g, const std::vector<double>& h,
              const GbmParams& p)
      : data_(data), g_(g), h_(h), p_(p), nf_(data.cuts.size()) {}

  Tree build(std::vector<std::size_t> rows) {
    Tree t;
    Histogram hist = histogram(rows);
    grow(t, rows, hist, 0);
    return t;
  }

 private:
  Histogram histogram(const std::vector<std::size_t>& rows) const {
    Histogram hist(nf_ * data_.max_codes);
    for (std::size_t f = 0; f < nf_; ++f) {
      Bucket* hf = hist.data() + f * data_.max_codes;
      const std::uint16_t* codes = data_.codes.data() + f * data_.rows;
      for (std::size_t r : rows) {
        Bucket& b = hf[codes[r]];
        b.g += g_[r];
        b.h += h_[r];
        b.n += 1;
      }
    }
    return hist;
  }

  double score(double g, double h) const { return g * g / (h + p_.l2); }

  Split best_split(const Histogram& hist, const Bucket& total) const {
    Split best;
    const double parent = score(total.g, total.h);
    for (std::size_t f = 0; f < nf_; ++f) {
      const Bucket* hf = hist.data() + f * data_.max_codes;
      const std::size_t nc = data_.num_codes(f);
      const Bucket& miss = hf[0];
      Bucket left;
      for (std::size_t c = 1; c + 1 < nc; ++c) {
        left.add(hf[c]);
        for (int side = 0; side < 2; ++side) {
          const bool missing_left = side == 0;
          Bucket l = left;
          if (missing_left) l.add(miss);
          Bucket r = total;
          r.sub(l);
          if (l.n < p_.min_leaf || r.n < p_.min_leaf) continue;
          const double gain = score(l.g, l.h) + score(r.g, r.h) - parent;
          if (gain > best.gain + 1e-12) best = {gain, static_cast<int>(f), c, missing_left};
          if (miss.n == 0) break;  // both sides identical
        }
      }
    }
    return best;
  }

  int grow(Tree& t, const std::vector<std::size_t>& rows, const Histogram& hist, int depth) {
    Bucket total;
    const Bucket* h0 = hist.data();  // feature 0 covers every row
    for (std::size_t c = 0; c < data_.max_codes; ++c) total.add(h0[c]);
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    t.nodes[id].cover = static_cast<double>(rows.size());
    t.nodes[id].value = -total.g / (total.h + p_.l2);
    if (depth >= p_.max_depth || nf_ == 0) return id;
    const Split s = best_split(hist, total);
    if (s.feature < 0) return id;

    std::vector<std::size_t> left, right;
    const auto f = static_cast<std::size_t>(s.feature);
    for (std::size_t r : rows) {
      const std::uint16_t c = data_.code(f, r);
      const bool go_left = c == 0 ? s.missing_left : c <= s.code;
      (go_left ? left : right).push_back(r);
    }
    // Build the smaller child's histogram and derive the sibling.
    const bool left_small = left.size() <= right.size();
    Histogram small = histogram(left_small ? left : right);
    Histogram large = hist;
    for (std::size_t k = 0; k < large.size(); ++k) large[k].sub(small[k]);
    const Histogram& hl = left_small ? small : large;
    const Histogram& hr = left_small ? large : small;

    TreeNode& node = t.nodes[id];
    node.feature = s.feature;
    node.threshold = data_.cuts[f][s.code - 1];
    node.missing_left = s.missing_left;
    const int l = grow(t, left, hl, depth + 1);
    const int r = grow(t, right, hr, depth + 1);
    t.nodes[id].left = l;
    t.nodes[id].right = r;
    return id;
  }

  const BinnedData& data_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const GbmParams& p_;
  std::size_t nf_;
};

}  // namespace

void GbmParams::validate() const {
  if (n_trees < 0) throw ConfigError("gbm: n_trees must be non-negative");
  if (max_depth < 1) throw ConfigError("gbm: max_depth must be at least 1");
  if (!(shrinkage > 0 && shrinkage <= 1)) throw ConfigError("gbm: shrinkage must lie in (0, 1]");
  if (min_leaf < 1) throw ConfigError("gbm: min_leaf must be at least 1");
  if (!(l2 >= 0)) throw ConfigError("gbm: l2 must be non-negative");
  if (max_bins < 2 || max_bins > 65000) throw ConfigError("gbm: max_bins must lie in [2, 65000]");
  if (!(subsample > 0 && subsample <= 1)) throw ConfigError("gbm: subsample must lie in (0, 1]");
}

int Tree::leaf_for(std::span<const double> x) const {
  int k = 0;
  while (!nodes[k].is_leaf()) {
    const TreeNode& n = nodes[k];
    const double v = x[static_cast<std::size_t>(n.feature)];
    const bool left = is_missing(v) ? n.missing_left : v <= n.threshold;
    k = left ? n.left : n.right;
  }
  return k;
}

double TreeEnsemble::margin(std::span<const double> x) const {
  if (x.size() != num_features())
    throw DimensionError(fmt::format("gbm: expected {} features, got {}", num_features(), x.size()));
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.predict(x);
  return base_score + shrinkage * sum;
}

double TreeEnsemble::probability(std::span<const double> x) const { return sigmoid(margin(x)); }

std::vector<double> TreeEnsemble::margins(const pipeline::DesignMatrix& m) const {
  if (m.names != feature_names) throw DimensionError("gbm: matrix columns differ from the model");
  std::vector<double> out(m.rows);
  std::vector<double> x(m.cols());
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) x[c] = m.at(r, c);
    out[r] = margin(x);
  }
  return out;
}

double log_loss(std::span<const double> margins, std::span<const int> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    // log(1 + e^m) - y m, written to stay finite for large |m|.
    const double m = margins[i];
    sum += (m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m))) - y[i] * m;
  }
  return y.empty() ? 0.0 : sum / static_cast<double>(y.size());
}

TreeEnsemble train(const pipeline::DesignMatrix& m, std::span<const int> y,
                   const GbmParams& params, std::vector<double>* loss_history) {
  params.validate();
  if (y.size() != m.rows) throw DimensionError("gbm: target length differs from matrix rows");
  if (m.rows == 0) throw EmptyInputError("gbm: no training rows");
  TreeEnsemble model;
  model.shrinkage = params.shrinkage;
  model.feature_names = m.names;
  const double positives = std::accumulate(y.begin(), y.end(), 0.0);
  const double prevalence = positives / static_cast<double>(m.rows);
  const double clamped = std::clamp(prevalence, 1e-6, 1.0 - 1e-6);
  model.base_score = std::log(clamped / (1.0 - clamped));

  std::vector<double> margin(m.rows, model.base_score);
  if (loss_history) loss_history->assign(1, log_loss(margin, y));
  if (positives == 0 || positives == static_cast<double>(m.rows)) {
    spdlog::warn("gbm: training target has a single class; returning the base score only");
    return model;
  }

  const BinnedData data = bin(m, params.max_bins);
  std::vector<double> g(m.rows), h(m.rows);
  std::vector<std::size_t> all(m.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> x(m.cols());
  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      const double p = sigmoid(margin[r]);
      g[r] = p - y[r];
      h[r] = std::max(p * (1.0 - p), 1e-16);
    }
    std::vector<std::size_t> rows;
    if (params.subsample < 1.0) {
      Rng rng = make_rng(params.seed, {static_cast<std::uint64_t>(t)});
      for (std::size_t r = 0; r < m.rows; ++r)
        if (uniform01(rng) < params.subsample) rows.push_back(r);
      if (rows.empty()) rows = all;
    } else {
      rows = all;
    }
    TreeBuilder builder(data, g, h, params);
    Tree tree = builder.build(std::move(rows));
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) x[c] = m.at(r, c);
      margin[r] += params.shrinkage * tree.predict(x);
    }
    model.trees.push_back(std::move(tree));
    if (loss_history) loss_history->push_back(log_loss(margin, y));
  }
  return model;
}

}  // namespace graphscore::gbm
