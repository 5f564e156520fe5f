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

#include "infofuse/decentralized.hpp"

#include <stdexcept>

namespace infofuse {

CcmnWeights::CcmnWeights(std::vector<SensorModel> sensors, std::vector<InternodalTransform> transforms,
                         StackedCovariance r)
    : sensors_(std::move(sensors)), transforms_(std::move(transforms)), r_(std::move(r)) {
  if (sensors_.size() != transforms_.size() || r_.num_sensors() != sensors_.size()) {
    throw std::invalid_argument("CcmnWeights: sensors, transforms and covariance disagree");
  }
  r_inv_ = spd_inverse(r_.full());
}

FusionWeightSet CcmnWeights::weights(int node, const FusionContext& ctx) {
  const auto& nodes = *ctx.nodes;
  const auto& hood = ctx.graph->neighborhood(node);
  // Neighbors' rows at the point they linearized at; others at our own prior.
  const Vector own = transforms_[node].pinv() * nodes[node].state.prior.mean;
  std::vector<Vector> points(sensors_.size(), own);
  for (int j : hood) points[j] = transforms_[j].pinv() * nodes[j].state.prior.mean;
  const Matrix h = stacked_jacobian(sensors_, points);

  FusionWeightSet out;
  out.source = WeightSource::kModelCcmn;
  const InternodalTransform& ti = transforms_[node];
  for (int j : hood) {
    const Matrix hj = sensor_rows(h, r_, j);
    const Matrix r_inv_col = r_inv_.middleCols(r_.offset(j), r_.dims()[j]);
    const Matrix m = h.transpose() * r_inv_col * r_.diagonal_block(j) * pseudo_inverse(hj).transpose();
    out.weights[j] = localize_weight(ti, m);
  }
  return out;
}

FusionWeightSet CumnWeights::weights(int node, const FusionContext& ctx) {
  FusionWeightSet out;
  out.source = WeightSource::kModelCumn;
  const Eigen::Index mi = ctx.graph->node_transform(node).local_dim();
  for (int j : ctx.graph->neighborhood(node)) out.weights[j] = Matrix::Identity(mi, mi);
  return out;
}

namespace {

CommunicationGraph graph_of(const std::vector<LocalModel>& nodes) {
  std::vector<InternodalTransform> ts;
  for (const auto& n : nodes) ts.push_back(n.transform);
  return build_graph(ts);
}

}  // namespace

DecentralizedFilter::DecentralizedFilter(std::vector<LocalModel> nodes, WeightProvider* weights)
    : nodes_(std::move(nodes)), weights_(weights), graph_(graph_of(nodes_)) {
  if (weights_ == nullptr) throw std::invalid_argument("DecentralizedFilter: weight provider required");
}

void DecentralizedFilter::reset(const GaussianBelief& global_initial) {
  posteriors_.clear();
  for (const auto& n : nodes_) {
    const Matrix& t = n.transform.matrix();
    posteriors_.push_back({t * global_initial.mean, symmetrize(t * global_initial.cov * t.transpose())});
  }
  local_.assign(nodes_.size(), NodeStep{});
  weights_->reset();
}

void DecentralizedFilter::local_stage(int /*k*/, const std::vector<Vector>& measurements) {
  if (measurements.size() != nodes_.size()) throw std::invalid_argument("local_stage: one measurement per node");
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const GaussianBelief prior = ekf_predict(posteriors_[j], nodes_[j]);
    local_[j].state = ekf_update(prior, measurements[j], nodes_[j]);
    local_[j].contribution = info_contribution(local_[j].state);
  }
}

void DecentralizedFilter::fusion_stage(int k) {
  const FusionContext ctx{k, &graph_, &local_};
  std::vector<InfoContribution> contributions;
  contributions.reserve(local_.size());
  for (const auto& n : local_) contributions.push_back(n.contribution);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const int node = static_cast<int>(i);
    const FusionWeightSet w = weights_->weights(node, ctx);
    posteriors_[i] = fuse_local(node, local_[i].state.prior, graph_, contributions, w);
  }
}

CentralizedFilter::CentralizedFilter(MotionModel motion, std::vector<SensorModel> sensors, StackedCovariance r)
    : motion_(motion), sensors_(std::move(sensors)), r_(std::move(r)) {}

void CentralizedFilter::step(int /*k*/, const std::vector<Vector>& measurements) {
  const Matrix f = motion_jacobian(motion_, belief_.mean);
  const GaussianBelief prior{propagate(motion_, belief_.mean),
                             symmetrize(f * belief_.cov * f.transpose() + process_noise_cov(motion_))};
  belief_ = centralized_update(prior, measurements, sensors_, r_);
}

}  // namespace infofuse
