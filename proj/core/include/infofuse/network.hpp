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

// The per-node weight network: FC+ReLU, GRU, FC+ReLU, FC. Input is the
// stacked information contributions of every sensor slot (zero for
// non-neighbors), output one m x m weight block per sensor.

#ifndef INFOFUSE_NETWORK_HPP_
#define INFOFUSE_NETWORK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "infofuse/decentralized.hpp"
#include "infofuse/distribution.hpp"
#include "infofuse/filters.hpp"
#include "infofuse/linalg.hpp"

namespace infofuse {

struct DifnetShape {
  int m = kStateDim;  // global state dimension
  int sensors = 4;    // N
  int h1 = 0;         // input FC width
  int h2 = 0;         // GRU hidden size
  int h3 = 0;         // middle FC width

  // Hidden widths of `factor` * m^2.
  static DifnetShape with_factor(int m, int sensors, int factor = 2);

  int input_dim() const { return (m + m * m) * sensors; }
  int output_dim() const { return m * m * sensors; }
  Eigen::Index num_params() const;
  void validate() const;
  bool operator==(const DifnetShape&) const = default;
};

// Parameter blocks in storage order. Matrices are column-major slices of
// one flat vector.
enum class ParamBlock { kInW, kInB, kWz, kUz, kBz, kWr, kUr, kBr, kWh, kUh, kBh, kMidW, kMidB, kOutW, kOutB };
inline constexpr int kNumParamBlocks = 15;

struct BlockLayout {
  Eigen::Index offset;
  Eigen::Index rows;
  Eigen::Index cols;
};

std::vector<BlockLayout> param_layout(const DifnetShape& shape);
std::string_view to_string(ParamBlock block);

class DifnetModel {
 public:
  DifnetModel() = default;
  // All parameters zero, unit input scale.
  explicit DifnetModel(const DifnetShape& shape);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per block. With
  // `identity_anchor`, the output bias holds identity blocks and the output
  // weights are shrunk so the untrained network emits weights near I.
  static DifnetModel initialized(const DifnetShape& shape, std::uint64_t seed, bool identity_anchor = true);

  const DifnetShape& shape() const { return shape_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  // Elementwise factor applied to the encoded input before the first layer.
  Vector& input_scale() { return input_scale_; }
  const Vector& input_scale() const { return input_scale_; }

  Eigen::Map<const Matrix> block(ParamBlock b) const;
  Eigen::Map<Matrix> block(ParamBlock b);

  // One recurrent step; `hidden` is advanced in place. Returns the raw
  // output of length m^2 N.
  Vector forward(const Vector& input, Vector& hidden) const;

 private:
  DifnetShape shape_;
  std::vector<BlockLayout> layout_;
  Vector params_;
  Vector input_scale_;
};

// Slot j holds [T^j^T i^j, row-major(T^j^T I^j T^j)] for neighbors of
// `node` (itself included) and zeros otherwise.
Vector encode_inputs(const std::vector<InfoContribution>& contributions, const CommunicationGraph& graph, int node,
                     int m);

// Block j of the network output as an m x m matrix (row-major order).
Matrix output_block(const Vector& output, int m, int j);

// Learned weights: node i's network maps the exchanged contributions to
// M~^j = T^i W^j T^i^T for every neighbor j.
class DifnetWeights : public WeightProvider {
 public:
  explicit DifnetWeights(std::vector<DifnetModel> models);

  void reset() override;
  FusionWeightSet weights(int node, const FusionContext& ctx) override;

  const std::vector<DifnetModel>& models() const { return models_; }

 private:
  std::vector<DifnetModel> models_;
  std::vector<Vector> hidden_;
};

}  // namespace infofuse

#endif  // INFOFUSE_NETWORK_HPP_
