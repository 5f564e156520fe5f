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

// On-disk form of trained networks and resumable training state.
//
// Model file (.difn), little-endian:
//   "DIFN" | u32 version | u32 m | u32 N | u32 h1 | u32 h2 | u32 h3 |
//   u64 input_dim, f64 input_scale[input_dim] |
//   u64 num_params, f64 params[num_params]   (blocks in ParamBlock order,
//                                             each column-major)
// Optimizer file (.adam): "DFNA" | u32 version | i64 step | u64 n |
//   f64 m[n] | f64 v[n].

#ifndef INFOFUSE_CHECKPOINT_HPP_
#define INFOFUSE_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "infofuse/network.hpp"
#include "infofuse/training.hpp"

namespace infofuse {

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const DifnetModel& model);
// Throws std::runtime_error on bad magic, version or truncation.
DifnetModel deserialize_model(const std::string& bytes);

void save_model(const std::filesystem::path& path, const DifnetModel& model);
DifnetModel load_model(const std::filesystem::path& path);

void save_optimizer(const std::filesystem::path& path, const AdamState& state);
AdamState load_optimizer(const std::filesystem::path& path);

// <dir>/node_<j>.difn for j = 1..n.
void save_models(const std::filesystem::path& dir, const std::vector<DifnetModel>& models);
std::vector<DifnetModel> load_models(const std::filesystem::path& dir, int count);

// key = value lines, sorted by key.
void write_manifest(const std::filesystem::path& path, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

std::string loss_csv(const std::vector<LossRecord>& history);

// Training directory layout:
//   models/node_<j>.difn      best-cv networks, models/manifest.txt
//   checkpoint/node_<j>.difn  latest networks, checkpoint/node_<j>.adam
//   checkpoint/state.json     epoch counters and loss history
//   loss.csv
void save_training(const std::filesystem::path& dir, const TrainingState& state,
                   const std::map<std::string, std::string>& manifest);
TrainingState load_training(const std::filesystem::path& dir, int nodes);

}  // namespace infofuse

#endif  // INFOFUSE_CHECKPOINT_HPP_
