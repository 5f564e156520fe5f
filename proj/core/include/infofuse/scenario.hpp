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

// Tracking scenarios: target motion, sensor network, jammer, initial belief
// and the mismatched parameters handed to the inexact methods.

#ifndef INFOFUSE_SCENARIO_HPP_
#define INFOFUSE_SCENARIO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "infofuse/distribution.hpp"
#include "infofuse/noise.hpp"
#include "infofuse/statespace.hpp"

namespace infofuse {

struct InexactParams {
  double q = 5.0;
  // 1-based sensor ids; block j of the mismatched covariance is the
  // element-wise square root of R^{noise_sources[j]}.
  std::vector<int> noise_sources;
};

// R_k = (1 + sigma cos(2 pi k / period)) R~ when sigma != 0.
struct TimeVariation {
  double sigma = 0.0;
  int period = 50;

  bool enabled() const { return sigma != 0.0; }
};

struct Scenario {
  std::string name;
  MotionModel motion;
  std::vector<SensorModel> sensors;  // noise_cov is the sensor's own R^j
  std::vector<InternodalTransform> transforms;
  JammerSpec jammer;
  Vector x0;
  GaussianBelief initial_belief;
  int steps = 50;
  InexactParams inexact;
  TimeVariation time_variation;

  std::size_t num_sensors() const { return sensors.size(); }
};

std::vector<std::string> builtin_scenario_names();
// Throws std::invalid_argument listing the available names.
Scenario builtin_scenario(std::string_view name);

Scenario linear_cv_scenario();
Scenario nonlinear_ct_scenario();
Scenario timevarying_scenario();

// Throws std::invalid_argument on inconsistent dimensions.
void validate(const Scenario& scenario);

// R~: sensor noise plus the jammer's cross-correlation.
StackedCovariance nominal_noise(const Scenario& scenario);
// Covariance actually realized at step k (k >= 1).
StackedCovariance true_noise(const Scenario& scenario, int k);
// Block-diagonal mismatched covariance.
StackedCovariance inexact_noise(const Scenario& scenario);
MotionModel inexact_motion(const Scenario& scenario);

// Scenario text format (YAML). Angles and turn rates are in degrees.
Scenario parse_scenario_yaml(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string dump_scenario_yaml(const Scenario& scenario);

// Resolves a built-in name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

// SHA-256 of the canonical text form.
std::string scenario_fingerprint(const Scenario& scenario);

}  // namespace infofuse

#endif  // INFOFUSE_SCENARIO_HPP_
