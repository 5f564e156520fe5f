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

#include "infofuse/experiments.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "infofuse/verification.hpp"

namespace infofuse {
namespace {

std::vector<Trajectory> trajectories(const Scenario& s, int n, std::uint64_t seed = 2) {
  std::vector<Trajectory> out;
  for (int l = 0; l < n; ++l) out.push_back(simulate_trajectory(s, seed, l));
  return out;
}

TEST(StepErrorsTest, ThreeFourFiveInPositionSlots) {
  const InternodalTransform full(Matrix::Identity(6, 6));
  Vector truth = Vector::Zero(6);
  Vector estimate = Vector::Zero(6);
  estimate(0) = 3.0;
  estimate(2) = 4.0;
  const StepErrors e = step_errors(full, truth, estimate);
  EXPECT_DOUBLE_EQ(std::sqrt(e.position), 5.0);
  EXPECT_DOUBLE_EQ(e.velocity, 0.0);
}

TEST(StepErrorsTest, LocalSpaceIgnoresUntrackedStates) {
  const Scenario s = builtin_scenario("linear-cv");
  const InternodalTransform& t4 = s.transforms[3];  // z and vz only
  Vector truth = Vector::Zero(6);
  truth << 30.0, 1.0, 40.0, 2.0, 5.0, -1.0;
  Vector estimate(2);
  estimate << 5.0, -1.0;
  const StepErrors e = step_errors(t4, truth, estimate);
  EXPECT_DOUBLE_EQ(e.position, 0.0);
  EXPECT_DOUBLE_EQ(e.velocity, 0.0);
  estimate << 2.0, 1.0;
  const StepErrors f = step_errors(t4, truth, estimate);
  EXPECT_DOUBLE_EQ(f.position, 9.0);
  EXPECT_DOUBLE_EQ(f.velocity, 4.0);
}

TEST(StepErrorsTest, PerfectEstimateIsZero) {
  const Scenario s = builtin_scenario("linear-cv");
  Vector x(6);
  x << 1, 2, 3, 4, 5, 6;
  for (const auto& t : s.transforms) {
    const StepErrors e = step_errors(t, x, t.matrix() * x);
    EXPECT_EQ(e.position, 0.0);
    EXPECT_EQ(e.velocity, 0.0);
  }
}

TEST(SummaryMeanTest, AveragesStepsTenThroughFifty) {
  Vector v(50);
  for (int k = 1; k <= 50; ++k) v(k - 1) = k;
  EXPECT_DOUBLE_EQ(summary_mean(v), 30.0);
  Vector short_v = Vector::Constant(12, 2.0);
  EXPECT_DOUBLE_EQ(summary_mean(short_v), 2.0);
}

TEST(EvaluateTest, CentralizedAndDifExactCurvesAgree) {
  const Scenario s = builtin_scenario("linear-cv");
  const auto test = trajectories(s, 6);
  const MethodReport c = evaluate_method(s, Method::kCentralizedExact, test);
  const MethodReport d = evaluate_method(s, Method::kDifExact, test);
  ASSERT_EQ(c.sensors.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_LT((c.sensors[j].rmse_position - d.sensors[j].rmse_position).cwiseAbs().maxCoeff(),
              1e-8 * c.sensors[j].rmse_position.maxCoeff());
    EXPECT_LT((c.sensors[j].rmse_velocity - d.sensors[j].rmse_velocity).cwiseAbs().maxCoeff(),
              1e-8 * c.sensors[j].rmse_velocity.maxCoeff());
  }
}

TEST(EvaluateTest, InvariantToOrderAndThreads) {
  const Scenario s = builtin_scenario("nonlinear-ct");
  auto test = trajectories(s, 5);
  const MethodReport a = evaluate_method(s, Method::kDifInexact, test, nullptr, 1);
  const MethodReport b = evaluate_method(s, Method::kDifInexact, test, nullptr, 3);
  std::reverse(test.begin(), test.end());
  const MethodReport c = evaluate_method(s, Method::kDifInexact, test, nullptr, 1);
  for (std::size_t j = 0; j < s.num_sensors(); ++j) {
    EXPECT_EQ(a.sensors[j].rmse_position, b.sensors[j].rmse_position);
    EXPECT_LT((a.sensors[j].rmse_position - c.sensors[j].rmse_position).cwiseAbs().maxCoeff(),
              1e-12 * a.sensors[j].rmse_position.maxCoeff());
  }
}

TEST(EvaluateTest, RmseIsNonNegativeAndStderrFinite) {
  const Scenario s = builtin_scenario("linear-cv");
  const MethodReport r = evaluate_method(s, Method::kCumn, trajectories(s, 4));
  EXPECT_TRUE(r.diverged.empty());
  for (const auto& c : r.sensors) {
    EXPECT_GE(c.rmse_position.minCoeff(), 0.0);
    EXPECT_TRUE(c.stderr_position.allFinite());
    EXPECT_GE(c.stderr_velocity.minCoeff(), 0.0);
  }
}

TEST(EvaluateTest, DifnetNeedsModels) {
  const Scenario s = builtin_scenario("linear-cv");
  EXPECT_THROW(evaluate_method(s, Method::kDifnet, trajectories(s, 1)), std::invalid_argument);
}

TEST(ReportTest, CsvShapes) {
  const Scenario s = builtin_scenario("linear-cv");
  const auto test = trajectories(s, 2);
  const std::vector<MethodReport> reports{evaluate_method(s, Method::kDifExact, test),
                                          evaluate_method(s, Method::kDifInexact, test)};
  const std::string rmse = rmse_csv(reports);
  EXPECT_EQ(rmse.rfind("method,sensor,step,rmse_position,rmse_velocity\n", 0), 0u);
  EXPECT_EQ(std::count(rmse.begin(), rmse.end(), '\n'), 1 + 2 * 4 * 50);
  const std::string summary = summary_csv(reports);
  EXPECT_EQ(summary.rfind("method,sensor,mean_rmse_pos,mean_rmse_vel\n", 0), 0u);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 2 * 4);
  EXPECT_NE(rmse_svg(reports, 0).find("<svg"), std::string::npos);
}

TEST(ReportTest, MethodFingerprintsShowInexactParameters) {
  const Scenario s = builtin_scenario("linear-cv");
  const std::string csv = methods_csv(s, all_methods());
  EXPECT_NE(csv.find("dif-inexact,5,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("difnet,5,"), std::string::npos) << csv;
  // dif-exact and cumn see the same node noise; dif-inexact does not.
  auto row = [&](std::string_view name) {
    const auto b = csv.find(std::string(name) + ",");
    return csv.substr(b, csv.find('\n', b) - b);
  };
  auto field = [](const std::string& line, int i) {
    std::size_t b = 0;
    for (int k = 0; k < i; ++k) b = line.find(',', b) + 1;
    return line.substr(b, line.find(',', b) - b);
  };
  EXPECT_EQ(field(row("dif-exact"), 2), field(row("cumn"), 2));
  EXPECT_NE(field(row("dif-exact"), 2), field(row("dif-inexact"), 2));
}

TEST(SweepTest, ZeroSigmaMatchesNominalEvaluation) {
  const Scenario s = builtin_scenario("linear-cv");
  const Dataset d = generate_dataset(s, {1, 1, 3}, 8);
  const auto rows = sigma_sweep(s, {0.0, 0.25, 0.5, 0.75}, d.test, 8, 2, {Method::kDifExact, Method::kCumn}, nullptr);
  EXPECT_EQ(rows.size(), 2u * 4u * 4u);
  const MethodReport nominal = evaluate_method(s, Method::kDifExact, d.test);
  int seen = 0;
  for (const auto& r : rows) {
    if (r.method != Method::kDifExact || r.sigma != 0.0) continue;
    EXPECT_DOUBLE_EQ(r.mean_rmse_position, nominal.mean_position(r.sensor - 1));
    ++seen;
  }
  EXPECT_EQ(seen, 4);
}

TEST(SweepTest, RejectsSigmaOutsideUnitInterval) {
  const Scenario s = builtin_scenario("linear-cv");
  EXPECT_THROW(sigma_sweep(s, {1.0}, trajectories(s, 1), 1, 0, {Method::kDifExact}, nullptr),
               std::invalid_argument);
}

TEST(BenchTest, DifExactIsTheReference) {
  const Scenario s = builtin_scenario("linear-cv");
  const auto results = bench_fusion_time(s, {Method::kDifInexact}, trajectories(s, 2), 3, nullptr);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].method, Method::kDifExact);
  EXPECT_DOUBLE_EQ(results[0].ratio, 1.0);
  EXPECT_TRUE(std::isfinite(results[1].ratio));
  EXPECT_GT(results[1].median_seconds, 0.0);
}

TEST(VerificationTest, LinearScenarioPasses) {
  const Scenario s = builtin_scenario("linear-cv");
  const VerificationReport r = verify_scenario(s, 4, 1);
  EXPECT_EQ(r.rows.size(), 50u);
  EXPECT_LT(r.max_exact, kIdentityTolerance);
  EXPECT_GT(r.max_perturbed, kPowerThreshold);
  EXPECT_TRUE(r.passed());
  const std::string csv = verification_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
}

TEST(VerificationTest, NonlinearScenarioRejected) {
  EXPECT_THROW(verify_scenario(builtin_scenario("nonlinear-ct"), 1), std::invalid_argument);
}

TEST(VerificationTest, DecentralizedMatchesCentralizedEveryStep) {
  const Scenario s = builtin_scenario("linear-cv");
  const EquivalenceReport r = centralized_equivalence(s, trajectories(s, 3), 2);
  EXPECT_EQ(r.steps_checked, 150);
  EXPECT_LT(r.max_mean_deviation, 1e-8);
  EXPECT_LT(r.max_cov_deviation, 1e-8);
}

}  // namespace
}  // namespace infofuse
