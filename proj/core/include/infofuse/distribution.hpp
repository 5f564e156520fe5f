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

// Model distribution: each node keeps a local state x^j = T^j x, and local
// models are derived from the global one through T^j and its pseudo-inverse.

#ifndef INFOFUSE_DISTRIBUTION_HPP_
#define INFOFUSE_DISTRIBUTION_HPP_

#include <utility>
#include <vector>

#include "infofuse/linalg.hpp"

namespace infofuse {

// Entries with magnitude above this make an internodal matrix non-null.
inline constexpr double kEdgeThreshold = 1e-12;

// m_j x m matrix picking a node's locally relevant states. The
// pseudo-inverse is computed once on construction.
class InternodalTransform {
 public:
  InternodalTransform() = default;
  explicit InternodalTransform(Matrix matrix);

  static InternodalTransform identity(Eigen::Index m);
  // Rows of the m x m identity listed in `rows`.
  static InternodalTransform rows_of_identity(Eigen::Index m, const std::vector<int>& rows);

  const Matrix& matrix() const { return matrix_; }
  const Matrix& pinv() const { return pinv_; }
  Eigen::Index local_dim() const { return matrix_.rows(); }
  Eigen::Index global_dim() const { return matrix_.cols(); }
  int rank() const { return rank_; }

  // T^T v and T^T A T: place a local quantity in the global space.
  Vector lift(const Vector& local) const { return matrix_.transpose() * local; }
  Matrix lift(const Matrix& local) const { return matrix_.transpose() * local * matrix_; }

 private:
  Matrix matrix_;
  Matrix pinv_;
  int rank_ = 0;
};

// T^{ij} = T^j (T^i)^dagger, mapping node i's local space into node j's.
Matrix internodal(const InternodalTransform& ti, const InternodalTransform& tj);

// grad f^j = T_k^j grad f (T_{k-1}^j)^dagger.
Matrix localize_motion(const InternodalTransform& t_now, const InternodalTransform& t_prev,
                       const Matrix& jacobian_f);

// grad c^j = grad h^j (T^j)^dagger.
Matrix localize_measurement_jacobian(const InternodalTransform& t, const Matrix& jacobian_h);

bool has_full_row_rank(const Matrix& a);

class CommunicationGraph {
 public:
  CommunicationGraph() = default;

  std::size_t size() const { return transforms_.size(); }
  const InternodalTransform& node_transform(int i) const { return transforms_.at(i); }

  // Directed: T^{ij} is non-null.
  bool has_directed_edge(int i, int j) const;
  // Undirected communication link, i != j.
  bool connected(int i, int j) const;
  // Node i and every node it communicates with, ascending.
  const std::vector<int>& neighborhood(int i) const { return neighborhoods_.at(i); }
  // T^{ij}.
  const Matrix& transform(int i, int j) const;
  // Undirected pairs (i < j).
  std::vector<std::pair<int, int>> edges() const;

  friend CommunicationGraph build_graph(const std::vector<InternodalTransform>& transforms);

 private:
  std::vector<InternodalTransform> transforms_;
  std::vector<Matrix> pairwise_;  // row-major N x N
  std::vector<std::vector<char>> directed_;
  std::vector<std::vector<int>> neighborhoods_;
};

CommunicationGraph build_graph(const std::vector<InternodalTransform>& transforms);

}  // namespace infofuse

#endif  // INFOFUSE_DISTRIBUTION_HPP_
