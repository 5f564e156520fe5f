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

// The decentralized filter with learned weights, unrolled over one trajectory
// on a gradient tape. Used for training and gradient checks; evaluation goes
// through DecentralizedFilter + DifnetWeights, which computes the same
// estimates without recording.

#ifndef INFOFUSE_UNROLLED_HPP_
#define INFOFUSE_UNROLLED_HPP_

#include <functional>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/distribution.hpp"
#include "infofuse/filters.hpp"
#include "infofuse/network.hpp"

namespace infofuse {

// Everything a node needs, in its local coordinates. Motion is linear in
// both shipped models, so the local transition is a constant matrix.
struct NodeSpec {
  InternodalTransform transform;
  Matrix transition;
  Matrix process_noise;
  Matrix noise_cov;
  std::function<Vector(const Vector&)> measure;
  std::function<Matrix(const Vector&)> jacobian;
  // Empty for linear sensors.
  std::function<std::vector<Matrix>(const Vector&)> hessians;
  std::vector<bool> angular;
};

struct NetworkSpec {
  std::vector<NodeSpec> nodes;
  CommunicationGraph graph;
  GaussianBelief initial;  // global x_0|0, P_0|0

  int state_dim() const { return static_cast<int>(initial.dim()); }
};

NodeSpec node_spec(const LocalModel& model);
// z = C x_local with constant C.
NodeSpec linear_node_spec(const InternodalTransform& transform, const Matrix& global_transition,
                          const Matrix& global_process_noise, const Matrix& c, const Matrix& noise_cov);
NetworkSpec network_spec(std::vector<NodeSpec> nodes, const GaussianBelief& initial);
NetworkSpec network_spec(const std::vector<LocalModel>& nodes, const GaussianBelief& initial);

// kLocal: exchanged contributions (the node's own broadcast included) enter
// fusion as constants, so one backward pass yields each node's gradient
// through its weights and its own prior recursion only.
// kExact: full derivative of L_i with respect to node i's parameters,
// including paths through neighbors (one backward pass per node).
enum class GradientMode { kLocal, kExact };

// Per node: (1/T) sum_k |T^i x_k - xhat_k^i|^2 for one trajectory.
std::vector<double> trajectory_loss(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                                    const Trajectory& trajectory);

struct TrajectoryGradient {
  std::vector<double> loss;   // as trajectory_loss
  std::vector<Vector> grads;  // d loss_i / d params_i, flat layout
};

TrajectoryGradient trajectory_gradient(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                                       const Trajectory& trajectory, GradientMode mode = GradientMode::kLocal);

}  // namespace infofuse

#endif  // INFOFUSE_UNROLLED_HPP_
