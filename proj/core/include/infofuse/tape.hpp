// Copyright 2026 The infofuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reverse-mode differentiation over dense matrices.
//
// A Tape records every operation of one forward pass; backward() walks it in
// reverse order and accumulates adjoints into the nodes that require them.
// Nodes whose inputs are all constant are stored without a backward rule.

#ifndef INFOFUSE_TAPE_HPP_
#define INFOFUSE_TAPE_HPP_

#include <functional>
#include <vector>

#include "infofuse/linalg.hpp"

namespace infofuse::ad {

class Tape;

struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  double scalar() const { return value()(0, 0); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var leaf(Matrix value);

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  bool requires_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].requires_grad; }
  // Zero matrix of the right shape when nothing flowed into v.
  Matrix grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1 for a 1x1 node and propagates. Adjoints from
  // earlier calls are cleared first.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  // Records an operation. `requires_grad` should be true iff any input does;
  // otherwise `backward` is dropped.
  Var record(Matrix value, bool requires_grad, Backward backward);
  // Adds g to the adjoint of v (no-op for constants).
  void accumulate(Var v, const Matrix& g);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

Var detach(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var matmul(Var a, Var b);
Var scale(Var a, double s);
// Elementwise product with a constant of the same shape.
Var cwise_scale(Var a, const Matrix& s);
Var transpose(Var a);
Var symmetrize(Var a);
// Inverse of a symmetric PD matrix; adjoint -A^-T G A^-T.
Var spd_inverse(Var a);

// W x + b, optionally followed by ReLU.
Var affine(Var w, Var x, Var b, bool relu);

struct GruParams {
  Var wz, uz, bz, wr, ur, br, wh, uh, bh;
};
Var gru_cell(const GruParams& p, Var input, Var hidden);

Var squared_norm(Var a);
Var sum(const std::vector<Var>& terms);

Var concat_rows(const std::vector<Var>& parts);
Var segment(Var a, Eigen::Index start, Eigen::Index length);
Var reshape_row_major(Var a, Eigen::Index rows, Eigen::Index cols);
Var flatten_row_major(Var a);

// y = f(x) given its value and Jacobian at x.
Var apply(Var x, Vector value, Matrix jacobian);
// Y = J(x) for a vector function whose row r has Hessian hessians[r].
Var jacobian_of(Var x, Matrix jacobian, std::vector<Matrix> hessians);
// Wraps the flagged rows into (-pi, pi]; the adjoint passes through.
Var wrap_rows(Var a, const std::vector<bool>& angular);

}  // namespace infofuse::ad

#endif  // INFOFUSE_TAPE_HPP_
