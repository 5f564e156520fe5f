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

#include "infofuse/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace infofuse {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream & 0xffffffffu), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

StackedCovariance::StackedCovariance(std::vector<int> dims, Matrix full)
    : dims_(std::move(dims)), full_(std::move(full)) {
  int total = 0;
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("stacked covariance: block dimension must be positive");
    offsets_.push_back(total);
    total += d;
  }
  if (full_.rows() != total || full_.cols() != total) {
    throw std::invalid_argument(
        fmt::format("stacked covariance: matrix is {}x{}, blocks sum to {}", full_.rows(), full_.cols(), total));
  }
}

StackedCovariance StackedCovariance::block_diagonal(const std::vector<Matrix>& blocks) {
  std::vector<int> dims;
  dims.reserve(blocks.size());
  for (const auto& b : blocks) dims.push_back(static_cast<int>(b.rows()));
  return StackedCovariance(std::move(dims), infofuse::block_diagonal(blocks));
}

Matrix StackedCovariance::block(int i, int j) const {
  return full_.block(offsets_.at(i), offsets_.at(j), dims_.at(i), dims_.at(j));
}

StackedCovariance StackedCovariance::without_cross_terms() const {
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < dims_.size(); ++i) blocks.push_back(diagonal_block(static_cast<int>(i)));
  return block_diagonal(blocks);
}

StackedCovariance stacked_covariance(const JammerSpec& jammer, const std::vector<SensorModel>& sensors) {
  const std::size_t n = sensors.size();
  if (jammer.betas.size() != n || jammer.selectors.size() != n) {
    throw std::invalid_argument("stacked_covariance: jammer betas/selectors must match the sensor count");
  }
  if (jammer.r0.rows() != jammer.r0.cols() || !is_symmetric(jammer.r0) ||
      Eigen::LLT<Matrix>(jammer.r0).info() != Eigen::Success) {
    throw std::invalid_argument("stacked_covariance: jammer covariance must be symmetric PD");
  }
  std::vector<int> dims;
  for (std::size_t i = 0; i < n; ++i) {
    const int nj = sensors[i].measurement_dim();
    if (jammer.selectors[i].rows() != nj || jammer.selectors[i].cols() != jammer.r0.rows()) {
      throw std::invalid_argument(fmt::format(
          "stacked_covariance: jammer selector {} must be {}x{}", i + 1, nj, jammer.r0.rows()));
    }
    if (sensors[i].noise_cov.rows() != nj) {
      throw std::invalid_argument(fmt::format("stacked_covariance: sensor {} noise size mismatch", i + 1));
    }
    dims.push_back(nj);
  }
  int total = 0;
  for (int d : dims) total += d;
  Matrix full(total, total);
  int ri = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int cj = 0;
    for (std::size_t j = 0; j < n; ++j) {
      Matrix b = jammer.betas[i] * jammer.betas[j] * jammer.selectors[i] * jammer.r0 *
                 jammer.selectors[j].transpose();
      if (i == j) b += sensors[i].noise_cov;
      full.block(ri, cj, dims[i], dims[j]) = b;
      cj += dims[j];
    }
    ri += dims[i];
  }
  full = symmetrize(full);
  if (Eigen::LLT<Matrix>(full).info() != Eigen::Success) {
    throw std::invalid_argument("stacked_covariance: result is not positive definite");
  }
  return StackedCovariance(std::move(dims), std::move(full));
}

StackedCovariance time_varying_scale(const StackedCovariance& base, int k, double sigma, int period) {
  if (!(std::abs(sigma) < 1.0)) throw std::invalid_argument("time_varying_scale: |sigma| must be < 1");
  if (period < 1) throw std::invalid_argument("time_varying_scale: period must be >= 1");
  const double factor = 1.0 + sigma * std::cos(2.0 * std::numbers::pi * k / period);
  return StackedCovariance(base.dims(), factor * base.full());
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = normal(rng);
  return u;
}

Vector sample_correlated(const StackedCovariance& cov, Rng& rng) {
  const Matrix lower = cholesky_lower(cov.full());
  return lower * standard_normal(lower.rows(), rng);
}

Vector sample_gaussian(const Matrix& cov, Rng& rng) {
  const Vector u = standard_normal(cov.rows(), rng);
  if (cov.isZero(0.0)) return Vector::Zero(cov.rows());
  return cholesky_lower(cov) * u;
}

}  // namespace infofuse
