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

// Identity checks for exact-parameter fusion on linear scenarios.

#ifndef INFOFUSE_VERIFICATION_HPP_
#define INFOFUSE_VERIFICATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/filters.hpp"
#include "infofuse/scenario.hpp"

namespace infofuse {

inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kPowerThreshold = 1e-4;

struct VerificationRow {
  int trajectory = 0;
  int step = 0;
  AssimilationResiduals exact;
  double perturbed_max = 0.0;  // same step with the mismatched R
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  double max_exact = 0.0;
  double max_perturbed = 0.0;

  bool passed() const { return max_exact < kIdentityTolerance && max_perturbed > kPowerThreshold; }
};

// Walks the centralized filter along simulated trajectories and, at every
// step, checks the assimilation identities from consistent node priors.
// Throws std::invalid_argument for scenarios with nonlinear sensors.
VerificationReport verify_scenario(const Scenario& scenario, std::uint64_t seed, int trajectories = 3);
std::string verification_csv(const VerificationReport& report);

struct EquivalenceReport {
  double max_mean_deviation = 0.0;  // |x^j - T^j x| / max(|T^j x|, 1)
  double max_cov_deviation = 0.0;   // Frobenius-relative
  long steps_checked = 0;
};

// dif-exact node posteriors against the projected centralized posterior at
// every step of every trajectory.
EquivalenceReport centralized_equivalence(const Scenario& scenario, const std::vector<Trajectory>& trajectories,
                                          int threads = 1);

}  // namespace infofuse

#endif  // INFOFUSE_VERIFICATION_HPP_
