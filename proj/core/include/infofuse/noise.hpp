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

// Stacked measurement-noise covariance with a shared jammer term, and
// correlated Gaussian sampling.

#ifndef INFOFUSE_NOISE_HPP_
#define INFOFUSE_NOISE_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "infofuse/linalg.hpp"
#include "infofuse/statespace.hpp"

namespace infofuse {

using Rng = std::mt19937_64;

// Independent generator for (seed, stream); streams separate truth and
// measurement draws of one trajectory.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Actual noise at sensor j: w^j + beta_j S^j w^0 with w^0 ~ N(0, R0).
struct JammerSpec {
  Matrix r0;
  std::vector<double> betas;
  std::vector<Matrix> selectors;  // S^j, n_j x dim(R0)
};

// N x N grid of blocks R^{ij} stored as one symmetric matrix.
class StackedCovariance {
 public:
  StackedCovariance() = default;
  StackedCovariance(std::vector<int> dims, Matrix full);

  static StackedCovariance block_diagonal(const std::vector<Matrix>& blocks);

  const Matrix& full() const { return full_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t num_sensors() const { return dims_.size(); }
  int total_dim() const { return static_cast<int>(full_.rows()); }
  int offset(int i) const { return offsets_.at(i); }

  Matrix block(int i, int j) const;
  Matrix diagonal_block(int i) const { return block(i, i); }
  // Keeps only the diagonal blocks.
  StackedCovariance without_cross_terms() const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  Matrix full_;
};

// R^{ij} = b_i b_j S^i R0 S^j^T for i != j and R^i + b_i^2 S^i R0 S^i^T on
// the diagonal. Throws std::invalid_argument when the result is not PD.
StackedCovariance stacked_covariance(const JammerSpec& jammer, const std::vector<SensorModel>& sensors);

// Every block scaled by 1 + sigma cos(2 pi k / period); |sigma| < 1.
StackedCovariance time_varying_scale(const StackedCovariance& base, int k, double sigma, int period);

// One zero-mean draw through the lower Cholesky factor. Throws
// NumericalError for a non-PD covariance.
Vector sample_correlated(const StackedCovariance& cov, Rng& rng);

// Same, for a plain covariance; an all-zero matrix yields a zero vector.
Vector sample_gaussian(const Matrix& cov, Rng& rng);

Vector standard_normal(Eigen::Index n, Rng& rng);

}  // namespace infofuse

#endif  // INFOFUSE_NOISE_HPP_
