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

#include <span>
#include <vector>

namespace graphscore::metrics {

// Probability that a random positive outscores a random negative, ties
// counting one half. Scores must be finite; both classes must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

// max_t |F_pos(t) - F_neg(t)| over the empirical score CDFs of the classes.
double ks(std::span<const double> scores, std::span<const int> labels);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

// Average (1-based) ranks with ties sharing the mean rank.
std::vector<double> midranks(std::span<const double> x);

}  // namespace graphscore::metrics
