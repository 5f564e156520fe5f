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

#include "infofuse/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "infofuse/noise.hpp"

namespace infofuse {

DifnetShape DifnetShape::with_factor(int m, int sensors, int factor) {
  DifnetShape s;
  s.m = m;
  s.sensors = sensors;
  s.h1 = s.h2 = s.h3 = factor * m * m;
  return s;
}

void DifnetShape::validate() const {
  if (m < 1 || sensors < 1 || h1 < 1 || h2 < 1 || h3 < 1) {
    throw std::invalid_argument(fmt::format("difnet shape: all sizes must be positive (m={}, N={}, h={}/{}/{})", m,
                                            sensors, h1, h2, h3));
  }
}

std::vector<BlockLayout> param_layout(const DifnetShape& s) {
  const Eigen::Index in = s.input_dim(), out = s.output_dim();
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> dims = {
      {s.h1, in}, {s.h1, 1},                                      // input FC
      {s.h2, s.h1}, {s.h2, s.h2}, {s.h2, 1},                      // update gate
      {s.h2, s.h1}, {s.h2, s.h2}, {s.h2, 1},                      // reset gate
      {s.h2, s.h1}, {s.h2, s.h2}, {s.h2, 1},                      // candidate
      {s.h3, s.h2}, {s.h3, 1},                                    // middle FC
      {out, s.h3},  {out, 1}};                                    // output FC
  std::vector<BlockLayout> layout;
  Eigen::Index off = 0;
  for (const auto& [r, c] : dims) {
    layout.push_back({off, r, c});
    off += r * c;
  }
  return layout;
}

Eigen::Index DifnetShape::num_params() const {
  const auto layout = param_layout(*this);
  return layout.back().offset + layout.back().rows * layout.back().cols;
}

std::string_view to_string(ParamBlock block) {
  static constexpr std::string_view kNames[kNumParamBlocks] = {"in_w", "in_b", "wz", "uz", "bz",    "wr",    "ur",   "br",
                                                               "wh",   "uh",   "bh", "mid_w", "mid_b", "out_w", "out_b"};
  return kNames[static_cast<int>(block)];
}

DifnetModel::DifnetModel(const DifnetShape& shape)
    : shape_(shape),
      layout_(param_layout(shape)),
      params_(Vector::Zero(shape.num_params())),
      input_scale_(Vector::Ones(shape.input_dim())) {
  shape_.validate();
}

DifnetModel DifnetModel::initialized(const DifnetShape& shape, std::uint64_t seed, bool identity_anchor) {
  DifnetModel model(shape);
  Rng rng = make_rng(seed, 0);
  // Fan-in of each block: the width of the layer input it multiplies.
  const int fan_in[kNumParamBlocks] = {shape.input_dim(), shape.input_dim(), shape.h1, shape.h2, shape.h2,
                                       shape.h1,          shape.h2,          shape.h2, shape.h1, shape.h2,
                                       shape.h2,          shape.h2,          shape.h2, shape.h3, shape.h3};
  for (int b = 0; b < kNumParamBlocks; ++b) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in[b]));
    std::uniform_real_distribution<double> u(-bound, bound);
    auto blk = model.block(static_cast<ParamBlock>(b));
    for (Eigen::Index c = 0; c < blk.cols(); ++c) {
      for (Eigen::Index r = 0; r < blk.rows(); ++r) blk(r, c) = u(rng);
    }
  }
  if (identity_anchor) {
    model.block(ParamBlock::kOutW) *= 1e-2;
    const Vector eye = flatten_row_major(Matrix::Identity(shape.m, shape.m));
    auto out_b = model.block(ParamBlock::kOutB);
    for (int j = 0; j < shape.sensors; ++j) out_b.middleRows(j * shape.m * shape.m, shape.m * shape.m) = eye;
  }
  return model;
}

Eigen::Map<const Matrix> DifnetModel::block(ParamBlock b) const {
  const BlockLayout& l = layout_.at(static_cast<std::size_t>(b));
  return Eigen::Map<const Matrix>(params_.data() + l.offset, l.rows, l.cols);
}

Eigen::Map<Matrix> DifnetModel::block(ParamBlock b) {
  const BlockLayout& l = layout_.at(static_cast<std::size_t>(b));
  return Eigen::Map<Matrix>(params_.data() + l.offset, l.rows, l.cols);
}

namespace {

Vector sigmoid(const Vector& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

}  // namespace

Vector DifnetModel::forward(const Vector& input, Vector& hidden) const {
  if (input.size() != shape_.input_dim()) {
    throw std::invalid_argument(fmt::format("difnet forward: input has {} entries, expected {}", input.size(),
                                            shape_.input_dim()));
  }
  if (hidden.size() != shape_.h2) hidden = Vector::Zero(shape_.h2);
  using B = ParamBlock;
  const Vector u = (block(B::kInW) * input.cwiseProduct(input_scale_) + block(B::kInB)).cwiseMax(0.0);
  const Vector z = sigmoid(block(B::kWz) * u + block(B::kUz) * hidden + block(B::kBz));
  const Vector r = sigmoid(block(B::kWr) * u + block(B::kUr) * hidden + block(B::kBr));
  const Vector cand =
      (block(B::kWh) * u + block(B::kUh) * r.cwiseProduct(hidden) + block(B::kBh)).array().tanh().matrix();
  hidden = hidden + z.cwiseProduct(cand - hidden);
  const Vector mid = (block(B::kMidW) * hidden + block(B::kMidB)).cwiseMax(0.0);
  return block(B::kOutW) * mid + block(B::kOutB);
}

Vector encode_inputs(const std::vector<InfoContribution>& contributions, const CommunicationGraph& graph, int node,
                     int m) {
  const int n = static_cast<int>(graph.size());
  if (static_cast<int>(contributions.size()) != n) throw std::invalid_argument("encode_inputs: one contribution per node");
  const int slot = m + m * m;
  Vector out = Vector::Zero(static_cast<Eigen::Index>(slot) * n);
  for (int j : graph.neighborhood(node)) {
    const Matrix& t = graph.node_transform(j).matrix();
    if (t.cols() != m) throw std::invalid_argument("encode_inputs: transform width differs from m");
    out.segment(j * slot, m) = t.transpose() * contributions[j].i_vec;
    out.segment(j * slot + m, m * m) = flatten_row_major(t.transpose() * contributions[j].I_mat * t);
  }
  return out;
}

Matrix output_block(const Vector& output, int m, int j) {
  return unflatten_row_major(output.segment(static_cast<Eigen::Index>(j) * m * m, m * m), m, m);
}

DifnetWeights::DifnetWeights(std::vector<DifnetModel> models) : models_(std::move(models)) { reset(); }

void DifnetWeights::reset() {
  hidden_.clear();
  for (const auto& m : models_) hidden_.push_back(Vector::Zero(m.shape().h2));
}

FusionWeightSet DifnetWeights::weights(int node, const FusionContext& ctx) {
  const DifnetModel& model = models_.at(static_cast<std::size_t>(node));
  const int m = model.shape().m;
  std::vector<InfoContribution> contributions;
  contributions.reserve(ctx.nodes->size());
  for (const auto& n : *ctx.nodes) contributions.push_back(n.contribution);
  const Vector out = model.forward(encode_inputs(contributions, *ctx.graph, node, m), hidden_[node]);
  const Matrix& ti = ctx.graph->node_transform(node).matrix();
  FusionWeightSet set;
  set.source = WeightSource::kLearned;
  for (int j : ctx.graph->neighborhood(node)) set.weights[j] = ti * output_block(out, m, j) * ti.transpose();
  return set;
}

}  // namespace infofuse
