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

#include "infofuse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace infofuse {

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s(0) : 0.0);
  Vector s_inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) s_inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) ++rank;
  }
  return rank;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

SpdInverse spd_inverse_with_jitter(const Matrix& a) {
  if (a.rows() != a.cols()) throw NumericalError("spd_inverse: matrix is not square");
  const Eigen::Index n = a.rows();
  if (!a.allFinite()) throw NumericalError("spd_inverse: matrix has non-finite entries");
  {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) return {symmetrize(llt.solve(Matrix::Identity(n, n))), 0.0};
  }
  const double trace = std::abs(a.trace());
  const double base = trace > 0.0 ? trace : 1.0;
  for (double rung = 1e-12; rung <= 1e-6 * (1.0 + 1e-9); rung *= 10.0) {
    const double jitter = rung * base;
    Eigen::LLT<Matrix> llt(a + jitter * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      return {symmetrize(llt.solve(Matrix::Identity(n, n))), jitter};
    }
  }
  throw NumericalError("spd_inverse: matrix is not positive definite (jitter ladder exhausted)");
}

Matrix spd_inverse(const Matrix& a) { return spd_inverse_with_jitter(a).inverse; }

Matrix cholesky_lower(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("cholesky: matrix is not positive definite");
  }
  return llt.matrixL();
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& a, double rel_tol) {
  if (!a.allFinite() || !is_symmetric(a, rel_tol)) return false;
  if (a.size() == 0) return true;
  return min_eigenvalue(a) >= -rel_tol * std::abs(a.trace());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Vector flatten_row_major(const Matrix& a) {
  Vector v(a.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(k++) = a(i, j);
  }
  return v;
}

Matrix unflatten_row_major(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unflatten_row_major: size mismatch");
  Matrix a(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = v(k++);
  }
  return a;
}

double wrap_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(radians, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

Matrix elementwise_sqrt(const Matrix& a) {
  if ((a.array() < 0.0).any()) {
    throw std::invalid_argument("elementwise_sqrt: negative entry");
  }
  return a.array().sqrt().matrix();
}

double relative_frobenius(const Matrix& a, const Matrix& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace infofuse
