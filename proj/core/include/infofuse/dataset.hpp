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

// Simulated trajectories and their on-disk form.
//
// Layout: <dir>/manifest.json and <dir>/{train,cv,test}/traj_NNNN.csv. Each
// CSV has a header and one row per step k = 1..T with columns
//   step, x0..x5 (true state), s<j>_z<r> (sensor j measurement row r),
// sensor ids 1-based, angles in radians, numbers printed with 17 significant
// digits so files round-trip exactly.

#ifndef INFOFUSE_DATASET_HPP_
#define INFOFUSE_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "infofuse/scenario.hpp"

namespace infofuse {

struct Trajectory {
  Matrix truth;                      // steps x 6, row k-1 holds x_k
  std::vector<Matrix> measurements;  // per sensor, steps x n_j

  int steps() const { return static_cast<int>(truth.rows()); }
  Vector state(int k) const { return truth.row(k - 1).transpose(); }
  std::vector<Vector> measurements_at(int k) const;
};

struct SplitSizes {
  int train = 100;
  int cv = 20;
  int test = 40;

  int total() const { return train + cv + test; }
};

enum class Split { kTrain, kCv, kTest };

std::string_view to_string(Split split);

struct Dataset {
  std::string scenario_name;
  std::string scenario_fingerprint;
  std::uint64_t seed = 0;
  SplitSizes sizes;
  std::vector<Trajectory> train;
  std::vector<Trajectory> cv;
  std::vector<Trajectory> test;

  const std::vector<Trajectory>& split(Split s) const;
};

// Random streams of one trajectory.
inline constexpr std::uint64_t kTruthStream = 0;
inline constexpr std::uint64_t kMeasurementStream = 1;

// Truth from x0 with sampled process noise, then measurements with the true
// (possibly time-varying) stacked covariance. `index` is the position across
// all splits (train, then cv, then test), so each trajectory has its own
// generators.
Trajectory simulate_trajectory(const Scenario& scenario, std::uint64_t seed, int index);

// Re-draws measurements for fixed truth with the same random numbers, e.g.
// under a different noise scale.
Trajectory remeasure(const Scenario& scenario, const Trajectory& base, std::uint64_t seed, int index);

Dataset generate_dataset(const Scenario& scenario, const SplitSizes& sizes, std::uint64_t seed, int threads = 1);

// Writes CSVs and manifest.json; returns the content hash recorded in it.
std::string save_dataset(const Dataset& dataset, const Scenario& scenario, const std::filesystem::path& dir);
// Throws std::runtime_error with the offending path on malformed input.
Dataset load_dataset(const std::filesystem::path& dir, const Scenario& scenario);

std::string trajectory_csv(const Trajectory& trajectory);
Trajectory parse_trajectory_csv(const std::string& text, const Scenario& scenario);

}  // namespace infofuse

#endif  // INFOFUSE_DATASET_HPP_
