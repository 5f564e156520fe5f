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

#include "infofuse/distribution.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace infofuse {

InternodalTransform::InternodalTransform(Matrix matrix)
    : matrix_(std::move(matrix)), pinv_(pseudo_inverse(matrix_)), rank_(numerical_rank(matrix_)) {
  if (matrix_.rows() > matrix_.cols()) {
    throw std::invalid_argument("internodal transform: local dimension exceeds global dimension");
  }
}

InternodalTransform InternodalTransform::identity(Eigen::Index m) {
  return InternodalTransform(Matrix::Identity(m, m));
}

InternodalTransform InternodalTransform::rows_of_identity(Eigen::Index m, const std::vector<int>& rows) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= m) throw std::invalid_argument("rows_of_identity: row out of range");
    t(static_cast<Eigen::Index>(r), rows[r]) = 1.0;
  }
  return InternodalTransform(std::move(t));
}

Matrix internodal(const InternodalTransform& ti, const InternodalTransform& tj) {
  if (ti.global_dim() != tj.global_dim()) {
    throw std::invalid_argument("internodal: transforms disagree on the global dimension");
  }
  return tj.matrix() * ti.pinv();
}

Matrix localize_motion(const InternodalTransform& t_now, const InternodalTransform& t_prev,
                       const Matrix& jacobian_f) {
  if (jacobian_f.rows() != t_now.global_dim() || jacobian_f.cols() != t_prev.global_dim()) {
    throw std::invalid_argument("localize_motion: dimension mismatch");
  }
  return t_now.matrix() * jacobian_f * t_prev.pinv();
}

Matrix localize_measurement_jacobian(const InternodalTransform& t, const Matrix& jacobian_h) {
  if (jacobian_h.cols() != t.global_dim()) {
    throw std::invalid_argument("localize_measurement_jacobian: dimension mismatch");
  }
  return jacobian_h * t.pinv();
}

bool has_full_row_rank(const Matrix& a) { return numerical_rank(a) == a.rows(); }

bool CommunicationGraph::has_directed_edge(int i, int j) const { return directed_.at(i).at(j) != 0; }

bool CommunicationGraph::connected(int i, int j) const {
  return i != j && (has_directed_edge(i, j) || has_directed_edge(j, i));
}

const Matrix& CommunicationGraph::transform(int i, int j) const {
  return pairwise_.at(static_cast<std::size_t>(i) * size() + static_cast<std::size_t>(j));
}

std::vector<std::pair<int, int>> CommunicationGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (connected(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

CommunicationGraph build_graph(const std::vector<InternodalTransform>& transforms) {
  if (transforms.empty()) throw std::invalid_argument("build_graph: no transforms");
  CommunicationGraph g;
  g.transforms_ = transforms;
  const std::size_t n = transforms.size();
  g.pairwise_.reserve(n * n);
  g.directed_.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Matrix tij = internodal(transforms[i], transforms[j]);
      g.directed_[i][j] = tij.size() > 0 && tij.cwiseAbs().maxCoeff() > kEdgeThreshold ? 1 : 0;
      g.pairwise_.push_back(std::move(tij));
    }
  }
  g.neighborhoods_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || g.connected(static_cast<int>(i), static_cast<int>(j))) {
        g.neighborhoods_[i].push_back(static_cast<int>(j));
      }
    }
  }
  return g;
}

}  // namespace infofuse
