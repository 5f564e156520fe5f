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

// Monte-Carlo evaluation: per-step RMSE curves, the sigma sweep, fusion-step
// timing, and their CSV/SVG forms.

#ifndef INFOFUSE_EXPERIMENTS_HPP_
#define INFOFUSE_EXPERIMENTS_HPP_

#include <string>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/methods.hpp"
#include "infofuse/network.hpp"
#include "infofuse/scenario.hpp"

namespace infofuse {

// Steps averaged into summary numbers (inclusive, clipped to the horizon).
inline constexpr int kSummaryFirstStep = 10;
inline constexpr int kSummaryLastStep = 50;

// Position and velocity rows of the global state.
inline constexpr int kPositionRows[3] = {0, 2, 4};
inline constexpr int kVelocityRows[3] = {1, 3, 5};

struct SensorCurves {
  Vector rmse_position;  // per step, length T
  Vector rmse_velocity;
  Vector stderr_position;
  Vector stderr_velocity;
};

struct MethodReport {
  Method method = Method::kDifExact;
  std::vector<SensorCurves> sensors;
  std::vector<int> diverged;  // trajectory indices excluded from the RMSE
  std::vector<std::string> failures;

  double mean_position(int sensor) const;
  double mean_velocity(int sensor) const;
};

// Squared local-space position/velocity errors, lifted through T^j dagger so
// components a node does not track contribute nothing.
struct StepErrors {
  double position = 0.0;
  double velocity = 0.0;
};
StepErrors step_errors(const InternodalTransform& t, const Vector& truth, const Vector& estimate);

// Runs `method` over `trajectories`. RMSE averages over the trajectories
// that did not diverge; the result is independent of evaluation order and
// thread count.
MethodReport evaluate_method(const Scenario& scenario, Method method, const std::vector<Trajectory>& trajectories,
                             const std::vector<DifnetModel>* models = nullptr, int threads = 1);

// Mean of v over steps [kSummaryFirstStep, kSummaryLastStep].
double summary_mean(const Vector& per_step);

std::string rmse_csv(const std::vector<MethodReport>& reports);
std::string rmse_stderr_csv(const std::vector<MethodReport>& reports);
std::string summary_csv(const std::vector<MethodReport>& reports);
std::string divergence_csv(const std::vector<MethodReport>& reports);
// What each method was told: motion q, node noise, weight source.
std::string methods_csv(const Scenario& scenario, const std::vector<Method>& methods);
// Position-RMSE line chart for one sensor.
std::string rmse_svg(const std::vector<MethodReport>& reports, int sensor, bool velocity = false);

std::vector<double> default_sigma_grid();

struct SweepRow {
  Method method;
  double sigma;
  int sensor;  // 1-based
  double mean_rmse_position;
  double mean_rmse_velocity;
  int diverged;
};

// For each sigma, test measurements are re-drawn (same random numbers, truth
// unchanged) under that sigma and every method is evaluated. `base_index` is
// the dataset index of the first test trajectory.
std::vector<SweepRow> sigma_sweep(const Scenario& scenario, const std::vector<double>& sigmas,
                                  const std::vector<Trajectory>& test, std::uint64_t seed, int base_index,
                                  const std::vector<Method>& methods, const std::vector<DifnetModel>* models,
                                  int threads = 1);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct BenchResult {
  Method method;
  double median_seconds;  // fusion stage per step
  double ratio;           // to dif-exact
  double ratio_first_half;
  double ratio_second_half;
};

// Times only DecentralizedFilter::fusion_stage. One warm-up repetition is
// discarded; methods are interleaved within each repetition.
std::vector<BenchResult> bench_fusion_time(const Scenario& scenario, const std::vector<Method>& methods,
                                           const std::vector<Trajectory>& trajectories, int repetitions,
                                           const std::vector<DifnetModel>* models);
std::string bench_csv(const std::vector<BenchResult>& results);

}  // namespace infofuse

#endif  // INFOFUSE_EXPERIMENTS_HPP_
