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

// Fully decentralized filtering: every sensor is a node running a local EKF,
// exchanging information contributions with its graph neighbors and fusing
// them into its own posterior.

#ifndef INFOFUSE_DECENTRALIZED_HPP_
#define INFOFUSE_DECENTRALIZED_HPP_

#include <memory>
#include <vector>

#include "infofuse/distribution.hpp"
#include "infofuse/filters.hpp"

namespace infofuse {

// What node j broadcasts after its local EKF at step k.
struct NodeStep {
  LocalFilterState state;
  InfoContribution contribution;
};

struct FusionContext {
  int step = 0;
  const CommunicationGraph* graph = nullptr;
  const std::vector<NodeStep>* nodes = nullptr;
};

class WeightProvider {
 public:
  virtual ~WeightProvider() = default;
  // Called at the start of every trajectory.
  virtual void reset() {}
  // Local weights M~^j for node `node`, keyed by neighbor index.
  virtual FusionWeightSet weights(int node, const FusionContext& ctx) = 0;
};

// Model-based weights from a stacked noise covariance.
class CcmnWeights : public WeightProvider {
 public:
  CcmnWeights(std::vector<SensorModel> sensors, std::vector<InternodalTransform> transforms, StackedCovariance r);

  FusionWeightSet weights(int node, const FusionContext& ctx) override;

 private:
  std::vector<SensorModel> sensors_;
  std::vector<InternodalTransform> transforms_;
  StackedCovariance r_;
  Matrix r_inv_;
};

// Identity weights: contributions treated as uncorrelated.
class CumnWeights : public WeightProvider {
 public:
  FusionWeightSet weights(int node, const FusionContext& ctx) override;
};

class DecentralizedFilter {
 public:
  DecentralizedFilter(std::vector<LocalModel> nodes, WeightProvider* weights);

  // Node posteriors become T^j x0, T^j P0 T^j^T; the weight provider resets.
  void reset(const GaussianBelief& global_initial);

  // Prediction, local update and contribution at every node.
  void local_stage(int k, const std::vector<Vector>& measurements);
  // Weights and fusion at every node; fused posteriors feed back as the
  // nodes' next EKF posteriors.
  void fusion_stage(int k);

  void step(int k, const std::vector<Vector>& measurements) {
    local_stage(k, measurements);
    fusion_stage(k);
  }

  const std::vector<GaussianBelief>& posteriors() const { return posteriors_; }
  const std::vector<NodeStep>& last_local() const { return local_; }
  const CommunicationGraph& graph() const { return graph_; }
  const std::vector<LocalModel>& nodes() const { return nodes_; }

 private:
  std::vector<LocalModel> nodes_;
  WeightProvider* weights_;
  CommunicationGraph graph_;
  std::vector<GaussianBelief> posteriors_;
  std::vector<NodeStep> local_;
};

// Global-state EKF with all measurements stacked; reports T^j projections.
class CentralizedFilter {
 public:
  CentralizedFilter(MotionModel motion, std::vector<SensorModel> sensors, StackedCovariance r);

  void reset(const GaussianBelief& initial) { belief_ = initial; }
  void step(int k, const std::vector<Vector>& measurements);
  const GaussianBelief& belief() const { return belief_; }

 private:
  MotionModel motion_;
  std::vector<SensorModel> sensors_;
  StackedCovariance r_;
  GaussianBelief belief_;
};

}  // namespace infofuse

#endif  // INFOFUSE_DECENTRALIZED_HPP_
