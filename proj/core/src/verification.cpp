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

#include "infofuse/verification.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "infofuse/decentralized.hpp"
#include "infofuse/methods.hpp"
#include "infofuse/parallel.hpp"

namespace infofuse {

namespace {

void require_linear(const Scenario& s) {
  for (const auto& sensor : s.sensors) {
    if (!sensor.is_linear()) {
      throw std::invalid_argument(
          fmt::format("scenario '{}' has nonlinear sensors; the identity checks need a linear scenario", s.name));
    }
  }
}

}  // namespace

VerificationReport verify_scenario(const Scenario& scenario, std::uint64_t seed, int trajectories) {
  require_linear(scenario);
  const StackedCovariance r = nominal_noise(scenario);
  const StackedCovariance r_bad = inexact_noise(scenario);
  VerificationReport report;
  for (int l = 0; l < trajectories; ++l) {
    const Trajectory traj = simulate_trajectory(scenario, seed, l);
    CentralizedFilter central(scenario.motion, scenario.sensors, r);
    central.reset(scenario.initial_belief);
    const Matrix f = transition_matrix(scenario.motion);
    const Matrix q = process_noise_cov(scenario.motion);
    for (int k = 1; k <= traj.steps(); ++k) {
      const GaussianBelief& post = central.belief();
      const GaussianBelief prior{f * post.mean, symmetrize(f * post.cov * f.transpose() + q)};
      const auto z = traj.measurements_at(k);
      VerificationRow row;
      row.trajectory = l;
      row.step = k;
      row.exact = verify_assimilation({prior, scenario.sensors, scenario.transforms, r, r, z});
      row.perturbed_max = verify_assimilation({prior, scenario.sensors, scenario.transforms, r, r_bad, z}).max();
      report.max_exact = std::max(report.max_exact, row.exact.max());
      report.max_perturbed = std::max(report.max_perturbed, row.perturbed_max);
      report.rows.push_back(std::move(row));
      central.step(k, z);
    }
  }
  return report;
}

std::string verification_csv(const VerificationReport& report) {
  std::string out = "trajectory,step,global_covariance,global_state,max_local_covariance,max_local_state,"
                    "max_local_consistency,perturbed_max\n";
  auto mx = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}\n", r.trajectory, r.step,
                       r.exact.global_covariance, r.exact.global_state, mx(r.exact.local_covariance),
                       mx(r.exact.local_state), mx(r.exact.local_consistency), r.perturbed_max);
  }
  return out;
}

EquivalenceReport centralized_equivalence(const Scenario& scenario, const std::vector<Trajectory>& trajectories,
                                          int threads) {
  std::vector<EquivalenceReport> per(trajectories.size());
  parallel_for(static_cast<int>(trajectories.size()), threads, [&](int l) {
    const Trajectory& traj = trajectories[static_cast<std::size_t>(l)];
    const StackedCovariance r = nominal_noise(scenario);
    CentralizedFilter central(scenario.motion, scenario.sensors, r);
    CcmnWeights weights(scenario.sensors, scenario.transforms, r);
    DecentralizedFilter dif(local_models(scenario, method_spec(scenario, Method::kDifExact)), &weights);
    central.reset(scenario.initial_belief);
    dif.reset(scenario.initial_belief);
    EquivalenceReport& rep = per[static_cast<std::size_t>(l)];
    for (int k = 1; k <= traj.steps(); ++k) {
      const auto z = traj.measurements_at(k);
      central.step(k, z);
      dif.step(k, z);
      for (std::size_t j = 0; j < scenario.num_sensors(); ++j) {
        const Matrix& t = scenario.transforms[j].matrix();
        const Vector ref_mean = t * central.belief().mean;
        const Matrix ref_cov = t * central.belief().cov * t.transpose();
        const GaussianBelief& node = dif.posteriors()[j];
        rep.max_mean_deviation =
            std::max(rep.max_mean_deviation, (node.mean - ref_mean).norm() / std::max(ref_mean.norm(), 1.0));
        rep.max_cov_deviation = std::max(rep.max_cov_deviation, relative_frobenius(node.cov, ref_cov));
      }
      ++rep.steps_checked;
    }
  });
  EquivalenceReport total;
  for (const auto& p : per) {
    total.max_mean_deviation = std::max(total.max_mean_deviation, p.max_mean_deviation);
    total.max_cov_deviation = std::max(total.max_cov_deviation, p.max_cov_deviation);
    total.steps_checked += p.steps_checked;
  }
  return total;
}

}  // namespace infofuse
