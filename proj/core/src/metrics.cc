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

#include "graphscore/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <fmt/format.h>

#include "graphscore/common.h"

namespace graphscore::metrics {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels,
                  std::size_t* pos, std::size_t* neg, const char* what) {
  if (scores.size() != labels.size())
    throw DimensionError(fmt::format("{}: {} scores for {} labels", what, scores.size(),
                                     labels.size()));
  *pos = *neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(fmt::format("{}: non-finite score", what));
    (labels[i] ? *pos : *neg) += 1;
  }
  if (*pos == 0 || *neg == 0) throw Error(fmt::format("{}: both classes are required", what));
}

std::vector<std::size_t> sorted_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos, neg;
  check_inputs(scores, labels, &pos, &neg, "auc");
  const auto order = sorted_order(scores);
  // Twice the positives' rank sum, kept integral: a tie block spanning ranks
  // [i+1, j] has midrank (i + 1 + j) / 2.
  std::int64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::int64_t block_pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      block_pos += labels[order[j]] ? 1 : 0;
      ++j;
    }
    twice_rank_sum += block_pos * static_cast<std::int64_t>(i + 1 + j);
    i = j;
  }
  const auto p = static_cast<std::int64_t>(pos);
  const std::int64_t numerator = twice_rank_sum - p * (p + 1);
  return static_cast<double>(numerator) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double ks(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos, neg;
  check_inputs(scores, labels, &pos, &neg, "ks");
  const auto order = sorted_order(scores);
  std::size_t c_pos = 0, c_neg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? c_pos : c_neg) += 1;
      ++j;
    }
    const double gap = std::abs(static_cast<double>(c_pos) / static_cast<double>(pos) -
                                static_cast<double>(c_neg) / static_cast<double>(neg));
    best = std::max(best, gap);
    i = j;
  }
  return best;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson: lengths differ");
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  // A constant column is uncorrelated with everything.
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> midranks(std::span<const double> x) {
  const auto order = sorted_order(x);
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = midranks(x), ry = midranks(y);
  return pearson(rx, ry);
}

}  // namespace graphscore::metrics
