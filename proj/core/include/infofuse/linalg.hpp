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

#ifndef INFOFUSE_LINALG_HPP_
#define INFOFUSE_LINALG_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace infofuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised when a factorization or inversion cannot be completed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular values below rel_tol * sigma_max are treated as zero.
inline constexpr double kPinvRelTol = 1e-10;

Matrix pseudo_inverse(const Matrix& a, double rel_tol = kPinvRelTol);

// Numerical rank with the same truncation rule as pseudo_inverse.
int numerical_rank(const Matrix& a, double rel_tol = kPinvRelTol);

// (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

struct SpdInverse {
  Matrix inverse;
  // Diagonal loading that was needed, 0 when the plain factorization succeeded.
  double jitter = 0.0;
};

// Inverse of a symmetric positive-definite matrix. On factorization failure a
// jitter ladder is tried: 1e-12 * trace * I, escalating by 10x up to
// 1e-6 * trace * I. Throws NumericalError when every rung fails.
SpdInverse spd_inverse_with_jitter(const Matrix& a);
Matrix spd_inverse(const Matrix& a);

// Lower Cholesky factor, throws NumericalError when `a` is not PD.
Matrix cholesky_lower(const Matrix& a);

bool is_symmetric(const Matrix& a, double rel_tol = 1e-9);
double min_eigenvalue(const Matrix& a);
// Symmetric and eigenvalues >= -rel_tol * |trace|.
bool is_psd(const Matrix& a, double rel_tol = 1e-9);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix block_diagonal(const std::vector<Matrix>& blocks);

// Row-major flattening, matching the network input/output layout.
Vector flatten_row_major(const Matrix& a);
Matrix unflatten_row_major(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

// Element-wise square root of a matrix with non-negative entries.
Matrix elementwise_sqrt(const Matrix& a);

// ||a - b||_F / max(||b||_F, floor).
double relative_frobenius(const Matrix& a, const Matrix& b, double floor = 1e-300);

}  // namespace infofuse

#endif  // INFOFUSE_LINALG_HPP_
