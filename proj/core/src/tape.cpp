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

#include "infofuse/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace infofuse::ad {

const Matrix& Var::value() const { return tape->value(*this); }
bool Var::requires_grad() const { return tape->requires_grad(*this); }

Var Tape::constant(Matrix value) { return record(std::move(value), false, nullptr); }
Var Tape::leaf(Matrix value) { return record(std::move(value), true, nullptr); }

Var Tape::record(Matrix value, bool requires_grad, Backward backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (!n.has_grad) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(Var v, const Matrix& g) {
  Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (!n.requires_grad) return;
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

void Tape::backward(Var loss) {
  if (loss.rows() != 1 || loss.cols() != 1) throw std::invalid_argument("backward: loss must be 1x1");
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  accumulate(loss, Matrix::Ones(1, 1));
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.has_grad || !n.backward) continue;
    // Rules only touch adjoints of earlier nodes, so n.grad stays valid.
    n.backward(*this, n.grad);
  }
}

namespace {

bool any_grad(std::initializer_list<Var> vs) {
  for (const Var& v : vs) {
    if (v.requires_grad()) return true;
  }
  return false;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Var detach(Var a) { return a.tape->constant(a.value()); }

Var add(Var a, Var b) {
  return a.tape->record(a.value() + b.value(), any_grad({a, b}), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  return a.tape->record(a.value() - b.value(), any_grad({a, b}), [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var matmul(Var a, Var b) {
  return a.tape->record(a.value() * b.value(), any_grad({a, b}), [a, b](Tape& t, const Matrix& g) {
    if (a.requires_grad()) t.accumulate(a, g * b.value().transpose());
    if (b.requires_grad()) t.accumulate(b, a.value().transpose() * g);
  });
}

Var scale(Var a, double s) {
  return a.tape->record(s * a.value(), a.requires_grad(),
                        [a, s](Tape& t, const Matrix& g) { t.accumulate(a, s * g); });
}

Var cwise_scale(Var a, const Matrix& s) {
  if (s.rows() != a.rows() || s.cols() != a.cols()) throw std::invalid_argument("cwise_scale: shape mismatch");
  return a.tape->record(a.value().cwiseProduct(s), a.requires_grad(),
                        [a, s](Tape& t, const Matrix& g) { t.accumulate(a, g.cwiseProduct(s)); });
}

Var transpose(Var a) {
  return a.tape->record(a.value().transpose(), a.requires_grad(),
                        [a](Tape& t, const Matrix& g) { t.accumulate(a, g.transpose()); });
}

Var symmetrize(Var a) {
  return a.tape->record(infofuse::symmetrize(a.value()), a.requires_grad(),
                        [a](Tape& t, const Matrix& g) { t.accumulate(a, 0.5 * (g + g.transpose())); });
}

Var spd_inverse(Var a) {
  Matrix inv = infofuse::spd_inverse(a.value());
  Matrix inv_t = inv.transpose();
  return a.tape->record(std::move(inv), a.requires_grad(), [a, inv_t = std::move(inv_t)](Tape& t, const Matrix& g) {
    t.accumulate(a, -inv_t * g * inv_t);
  });
}

Var affine(Var w, Var x, Var b, bool relu) {
  Matrix y = w.value() * x.value() + b.value();
  if (relu) y = y.cwiseMax(0.0);
  Matrix out = y;
  return w.tape->record(std::move(out), any_grad({w, x, b}), [w, x, b, relu, y = std::move(y)](Tape& t, const Matrix& g) {
    Matrix gp = g;
    if (relu) gp = (y.array() > 0.0).select(g, 0.0);
    if (w.requires_grad()) t.accumulate(w, gp * x.value().transpose());
    if (x.requires_grad()) t.accumulate(x, w.value().transpose() * gp);
    if (b.requires_grad()) t.accumulate(b, gp);
  });
}

Var gru_cell(const GruParams& p, Var u, Var h) {
  const Vector& uv = u.value();
  const Vector& hv = h.value();
  const Vector z = (p.wz.value() * uv + p.uz.value() * hv + p.bz.value()).unaryExpr(&sigmoid);
  const Vector r = (p.wr.value() * uv + p.ur.value() * hv + p.br.value()).unaryExpr(&sigmoid);
  const Vector rh = r.cwiseProduct(hv);
  const Vector cand = (p.wh.value() * uv + p.uh.value() * rh + p.bh.value()).array().tanh().matrix();
  const Vector out = hv + z.cwiseProduct(cand - hv);
  const bool rg = any_grad({p.wz, p.uz, p.bz, p.wr, p.ur, p.br, p.wh, p.uh, p.bh, u, h});
  return u.tape->record(out, rg, [p, u, h, z, r, rh, cand](Tape& t, const Matrix& g) {
    const Vector& uv = u.value();
    const Vector& hv = h.value();
    const Vector d_cand = g.col(0).cwiseProduct(z);
    const Vector d_z = g.col(0).cwiseProduct(cand - hv);
    Vector d_h = g.col(0).cwiseProduct(Vector::Ones(z.size()) - z);
    const Vector a_h = d_cand.cwiseProduct((1.0 - cand.array().square()).matrix());
    const Vector a_z = d_z.cwiseProduct(z.cwiseProduct(Vector::Ones(z.size()) - z));
    const Vector d_rh = p.uh.value().transpose() * a_h;
    const Vector d_r = d_rh.cwiseProduct(hv);
    d_h += d_rh.cwiseProduct(r);
    const Vector a_r = d_r.cwiseProduct(r.cwiseProduct(Vector::Ones(r.size()) - r));
    d_h += p.uz.value().transpose() * a_z + p.ur.value().transpose() * a_r;
    if (u.requires_grad()) {
      t.accumulate(u, p.wz.value().transpose() * a_z + p.wr.value().transpose() * a_r +
                          p.wh.value().transpose() * a_h);
    }
    if (h.requires_grad()) t.accumulate(h, d_h);
    if (p.wz.requires_grad()) t.accumulate(p.wz, a_z * uv.transpose());
    if (p.uz.requires_grad()) t.accumulate(p.uz, a_z * hv.transpose());
    if (p.bz.requires_grad()) t.accumulate(p.bz, a_z);
    if (p.wr.requires_grad()) t.accumulate(p.wr, a_r * uv.transpose());
    if (p.ur.requires_grad()) t.accumulate(p.ur, a_r * hv.transpose());
    if (p.br.requires_grad()) t.accumulate(p.br, a_r);
    if (p.wh.requires_grad()) t.accumulate(p.wh, a_h * uv.transpose());
    if (p.uh.requires_grad()) t.accumulate(p.uh, a_h * rh.transpose());
    if (p.bh.requires_grad()) t.accumulate(p.bh, a_h);
  });
}

Var squared_norm(Var a) {
  return a.tape->record(Matrix::Constant(1, 1, a.value().squaredNorm()), a.requires_grad(),
                        [a](Tape& t, const Matrix& g) { t.accumulate(a, 2.0 * g(0, 0) * a.value()); });
}

Var sum(const std::vector<Var>& terms) {
  if (terms.empty()) throw std::invalid_argument("sum: no terms");
  Matrix total = terms.front().value();
  bool rg = terms.front().requires_grad();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    total += terms[i].value();
    rg = rg || terms[i].requires_grad();
  }
  return terms.front().tape->record(std::move(total), rg, [terms](Tape& t, const Matrix& g) {
    for (const Var& v : terms) t.accumulate(v, g);
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front().cols();
  bool rg = false;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: column mismatch");
    rows += p.rows();
    rg = rg || p.requires_grad();
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return parts.front().tape->record(std::move(out), rg, [parts](Tape& t, const Matrix& g) {
    Eigen::Index off = 0;
    for (const Var& p : parts) {
      if (p.requires_grad()) t.accumulate(p, g.middleRows(off, p.rows()));
      off += p.rows();
    }
  });
}

Var segment(Var a, Eigen::Index start, Eigen::Index length) {
  return a.tape->record(a.value().middleRows(start, length), a.requires_grad(),
                        [a, start, length](Tape& t, const Matrix& g) {
                          Matrix full = Matrix::Zero(a.rows(), a.cols());
                          full.middleRows(start, length) = g;
                          t.accumulate(a, full);
                        });
}

Var reshape_row_major(Var a, Eigen::Index rows, Eigen::Index cols) {
  if (a.cols() != 1 || a.rows() != rows * cols) throw std::invalid_argument("reshape_row_major: size mismatch");
  return a.tape->record(unflatten_row_major(a.value(), rows, cols), a.requires_grad(),
                        [a](Tape& t, const Matrix& g) { t.accumulate(a, infofuse::flatten_row_major(g)); });
}

Var flatten_row_major(Var a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  return a.tape->record(infofuse::flatten_row_major(a.value()), a.requires_grad(),
                        [a, rows, cols](Tape& t, const Matrix& g) {
                          t.accumulate(a, unflatten_row_major(g, rows, cols));
                        });
}

Var apply(Var x, Vector value, Matrix jacobian) {
  return x.tape->record(std::move(value), x.requires_grad(), [x, jacobian = std::move(jacobian)](Tape& t, const Matrix& g) {
    t.accumulate(x, jacobian.transpose() * g);
  });
}

Var jacobian_of(Var x, Matrix jacobian, std::vector<Matrix> hessians) {
  if (static_cast<Eigen::Index>(hessians.size()) != jacobian.rows()) {
    throw std::invalid_argument("jacobian_of: one Hessian per row");
  }
  return x.tape->record(std::move(jacobian), x.requires_grad(),
                        [x, hessians = std::move(hessians)](Tape& t, const Matrix& g) {
                          Vector gx = Vector::Zero(x.rows());
                          for (std::size_t r = 0; r < hessians.size(); ++r) {
                            gx += hessians[r] * g.row(static_cast<Eigen::Index>(r)).transpose();
                          }
                          t.accumulate(x, gx);
                        });
}

Var wrap_rows(Var a, const std::vector<bool>& angular) {
  Matrix v = a.value();
  for (std::size_t r = 0; r < angular.size(); ++r) {
    if (angular[r]) v(static_cast<Eigen::Index>(r), 0) = wrap_angle(v(static_cast<Eigen::Index>(r), 0));
  }
  return a.tape->record(std::move(v), a.requires_grad(), [a](Tape& t, const Matrix& g) { t.accumulate(a, g); });
}

}  // namespace infofuse::ad
