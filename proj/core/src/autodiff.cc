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

#include "graphscore/autodiff.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace graphscore::ad {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(fmt::format("{}: shapes {}x{} and {}x{} differ", op, a.rows(), a.cols(),
                                     b.rows(), b.cols()));
}

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

Var Tape::push(Matrix value, bool requires_grad,
               std::function<void(Tape&, const Matrix&)> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backward = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[v.id];
  if (!n.requires_grad) return;
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.cols() != vb.rows())
    throw DimensionError(fmt::format("matmul: {}x{} times {}x{}", va.rows(), va.cols(),
                                     vb.rows(), vb.cols()));
  return push(va * vb, needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    if (t.needs(a)) t.accumulate(a, g * t.value(b).transpose());
    if (t.needs(b)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

Matrix multiply(const NormalizedAdjacency& a, const Matrix& x) {
  if (static_cast<Eigen::Index>(a.size()) != x.rows())
    throw DimensionError(
        fmt::format("propagate: operator has {} columns, input has {} rows", a.size(), x.rows()));
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < a.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = a.offsets[i]; k < a.offsets[i + 1]; ++k)
        acc += a.values[k] * x(a.columns[k], j);
      out(static_cast<Eigen::Index>(i), j) = acc;
    }
  return out;
}

Var Tape::propagate(const NormalizedAdjacency& a, Var x) {
  return push(multiply(a, value(x)), needs(x), [&a, x](Tape& t, const Matrix& g) {
    t.accumulate(x, multiply(a, g));
  });
}

Var Tape::add(Var a, Var b) {
  check_same_shape(value(a), value(b), "add");
  return push(value(a) + value(b), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::sub(Var a, Var b) {
  check_same_shape(value(a), value(b), "sub");
  return push(value(a) - value(b), needs(a) || needs(b), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var Tape::scale(Var a, double s) {
  return push(value(a) * s, needs(a), [a, s](Tape& t, const Matrix& g) {
    t.accumulate(a, g * s);
  });
}

Var Tape::add_row(Var a, Var row) {
  const Matrix& va = value(a);
  const Matrix& vr = value(row);
  if (vr.rows() != 1 || vr.cols() != va.cols())
    throw DimensionError(fmt::format("add_row: row {}x{} for matrix {}x{}", vr.rows(), vr.cols(),
                                     va.rows(), va.cols()));
  Matrix out = va.rowwise() + vr.row(0);
  return push(std::move(out), needs(a) || needs(row), [a, row](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(row, g.colwise().sum());
  });
}

Var Tape::relu(Var a) {
  Matrix out = value(a).cwiseMax(0.0);
  return push(std::move(out), needs(a), [a](Tape& t, const Matrix& g) {
    t.accumulate(a, (t.value(a).array() > 0.0).cast<double>().matrix().cwiseProduct(g));
  });
}

Var Tape::softmax_cross_entropy(Var logits, const std::vector<int>& labels) {
  const Matrix& z = value(logits);
  if (static_cast<Eigen::Index>(labels.size()) != z.rows())
    throw DimensionError(fmt::format("softmax_cross_entropy: {} labels for {} rows",
                                     labels.size(), z.rows()));
  Matrix probs(z.rows(), z.cols());
  double loss = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (z.row(i).array() - m).exp().matrix();
    const double s = e.sum();
    probs.row(i) = e / s;
    if (labels[i] < 0) continue;
    if (labels[i] >= z.cols()) throw IndexError("softmax_cross_entropy: label out of range");
    loss -= z(i, labels[i]) - m - std::log(s);
    ++count;
  }
  if (count > 0) loss /= static_cast<double>(count);
  Matrix out(1, 1);
  out(0, 0) = loss;
  return push(std::move(out), needs(logits),
              [logits, labels, probs = std::move(probs), count](Tape& t, const Matrix& g) {
                if (count == 0) return;
                Matrix d = Matrix::Zero(probs.rows(), probs.cols());
                for (Eigen::Index i = 0; i < probs.rows(); ++i) {
                  if (labels[i] < 0) continue;
                  d.row(i) = probs.row(i);
                  d(i, labels[i]) -= 1.0;
                }
                t.accumulate(logits, d * (g(0, 0) / static_cast<double>(count)));
              });
}

Var Tape::pair_logistic_loss(Var z, const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs,
                             const std::vector<double>& targets) {
  if (pairs.size() != targets.size())
    throw DimensionError("pair_logistic_loss: pairs and targets differ in length");
  const Matrix& vz = value(z);
  std::vector<double> coef(pairs.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [u, v] = pairs[k];
    if (static_cast<Eigen::Index>(std::max(u, v)) >= vz.rows()) throw IndexError("pair_logistic_loss: node out of range");
    const double s = vz.row(u).dot(vz.row(v));
    loss -= targets[k] * log_sigmoid(s) + (1.0 - targets[k]) * log_sigmoid(-s);
    coef[k] = 1.0 / (1.0 + std::exp(-s)) - targets[k];
  }
  const double n = pairs.empty() ? 1.0 : static_cast<double>(pairs.size());
  Matrix out(1, 1);
  out(0, 0) = loss / n;
  return push(std::move(out), needs(z),
              [z, pairs, coef = std::move(coef), n](Tape& t, const Matrix& g) {
                const Matrix& vz = t.value(z);
                Matrix d = Matrix::Zero(vz.rows(), vz.cols());
                for (std::size_t k = 0; k < pairs.size(); ++k) {
                  const auto [u, v] = pairs[k];
                  d.row(u) += coef[k] * vz.row(v);
                  d.row(v) += coef[k] * vz.row(u);
                }
                t.accumulate(z, d * (g(0, 0) / n));
              });
}

Var Tape::half_squared_norm(Var a) {
  Matrix out(1, 1);
  out(0, 0) = 0.5 * value(a).squaredNorm();
  return push(std::move(out), needs(a), [a](Tape& t, const Matrix& g) {
    t.accumulate(a, t.value(a) * g(0, 0));
  });
}

void Tape::backward(Var root) {
  if (value(root).size() != 1) throw DimensionError("backward: root must be a scalar");
  for (auto& n : nodes_) {
    n.grad.resize(0, 0);
    n.has_grad = false;
  }
  nodes_[root.id].grad = Matrix::Ones(1, 1);
  nodes_[root.id].has_grad = true;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || !n.has_grad) continue;
    const Matrix g = n.grad;
    n.backward(*this, g);
  }
  for (auto& n : nodes_)
    if (n.requires_grad && !n.has_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
}

}  // namespace graphscore::ad
