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

#include <benchmark/benchmark.h>

#include "infofuse/dataset.hpp"
#include "infofuse/decentralized.hpp"
#include "infofuse/methods.hpp"
#include "infofuse/network.hpp"
#include "infofuse/tape.hpp"
#include "infofuse/training.hpp"
#include "infofuse/unrolled.hpp"

namespace infofuse {
namespace {

const Scenario& scenario_for(int which) {
  static const Scenario linear = builtin_scenario("linear-cv");
  static const Scenario nonlinear = builtin_scenario("nonlinear-ct");
  return which == 0 ? linear : nonlinear;
}

// One full 50-step trajectory through a method's pipeline.
void BM_RunTrajectory(benchmark::State& state) {
  const Scenario& s = scenario_for(static_cast<int>(state.range(0)));
  const auto method = static_cast<Method>(state.range(1));
  const Trajectory traj = simulate_trajectory(s, 1, 0);
  std::vector<DifnetModel> models;
  if (method == Method::kDifnet) {
    const DifnetShape shape = DifnetShape::with_factor(6, static_cast<int>(s.num_sensors()));
    for (std::size_t j = 0; j < s.num_sensors(); ++j) models.push_back(DifnetModel::initialized(shape, 1));
  }
  MethodRunner runner(s, method, models.empty() ? nullptr : &models);
  for (auto _ : state) benchmark::DoNotOptimize(runner.run(traj));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_RunTrajectory)
    ->ArgsProduct({{0, 1},
                   {static_cast<long>(Method::kCentralizedExact), static_cast<long>(Method::kDifExact),
                    static_cast<long>(Method::kDifInexact), static_cast<long>(Method::kCumn),
                    static_cast<long>(Method::kDifnet)}})
    ->Unit(benchmark::kMicrosecond);

void BM_DifnetForward(benchmark::State& state) {
  const DifnetShape shape = DifnetShape::with_factor(6, 4);
  const DifnetModel model = DifnetModel::initialized(shape, 3);
  const Vector input = Vector::Random(shape.input_dim());
  Vector hidden = Vector::Zero(shape.h2);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(input, hidden));
}
BENCHMARK(BM_DifnetForward)->Unit(benchmark::kMicrosecond);

// Loss and gradient of one training trajectory for all nodes.
void BM_TrajectoryGradient(benchmark::State& state) {
  const Scenario& s = scenario_for(static_cast<int>(state.range(0)));
  const NetworkSpec spec = difnet_network(s);
  const DifnetShape shape = DifnetShape::with_factor(6, static_cast<int>(s.num_sensors()));
  std::vector<DifnetModel> models;
  for (std::size_t j = 0; j < s.num_sensors(); ++j) models.push_back(DifnetModel::initialized(shape, 1));
  const Trajectory traj = simulate_trajectory(s, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(trajectory_gradient(spec, models, traj));
}
BENCHMARK(BM_TrajectoryGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace infofuse

BENCHMARK_MAIN();
