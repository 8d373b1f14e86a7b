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

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphscore/graph.h"

namespace graphscore::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

// A * x in CSR row order.
Matrix multiply(const NormalizedAdjacency& a, const Matrix& x);

// Handle to a value recorded on a tape.
struct Var {
  std::size_t id = 0;
};

// Records matrix operations and replays them backwards. Every op allocates a
// fresh node; a tape is meant for one forward/backward pass.
class Tape {
 public:
  // Constant input (no gradient) or trainable leaf.
  Var constant(Matrix value) { return push(std::move(value), false, {}); }
  Var parameter(Matrix value) { return push(std::move(value), true, {}); }

  Var matmul(Var a, Var b);
  // A * x for a fixed symmetric operator A (the backward pass reuses A), which
  // must outlive the tape. Rows are summed in CSR order.
  Var propagate(const NormalizedAdjacency& a, Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var a, double s);
  // Adds a 1 x c row vector to every row of a.
  Var add_row(Var a, Var row);
  Var relu(Var a);
  // 1x1: mean softmax cross-entropy over rows whose label is >= 0.
  Var softmax_cross_entropy(Var logits, const std::vector<int>& labels);
  // 1x1: mean binary cross-entropy of sigmoid(z_u . z_v) against targets.
  Var pair_logistic_loss(Var z, const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
                         const std::vector<double>& targets);
  // 1x1: 0.5 * squared Frobenius norm.
  Var half_squared_norm(Var a);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Gradient of the last backward() root with respect to v; zeros for
  // parameters the root does not depend on.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }

  // Seeds d(root)/d(root) = 1; root must be 1x1.
  void backward(Var root);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    std::function<void(Tape&, const Matrix&)> backward;
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Tape&, const Matrix&)> back);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  void accumulate(Var v, const Matrix& g);

  std::vector<Node> nodes_;
};

}  // namespace graphscore::ad
