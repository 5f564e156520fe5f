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

#include "infofuse/scenario.hpp"

#include <gtest/gtest.h>

#include "infofuse/config_keys.hpp"

namespace infofuse {
namespace {

TEST(ScenarioTest, BuiltinsAreValid) {
  for (const auto& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    EXPECT_NO_THROW(validate(s)) << name;
    EXPECT_EQ(s.steps, 50);
    EXPECT_EQ(s.num_sensors(), 4u);
  }
  EXPECT_THROW(builtin_scenario("linear"), std::invalid_argument);
}

TEST(ScenarioTest, LinearNoiseBlocks) {
  const Scenario s = linear_cv_scenario();
  const StackedCovariance r = nominal_noise(s);
  EXPECT_EQ(r.dims(), (std::vector<int>{4, 4, 6, 2}));
  // Diagonal: R^1 + 0.25 R0 block.
  EXPECT_DOUBLE_EQ(r.block(0, 0)(0, 0), 1e4 + 0.25 * 1e4);
  // Sensors 1 and 4 share no jammer components.
  EXPECT_TRUE(r.block(0, 3).isZero(0.0));
  EXPECT_DOUBLE_EQ(r.block(2, 3)(4, 0), 0.25 * 1e4);
  EXPECT_DOUBLE_EQ(r.block(2, 3)(0, 0), 0.0);
}

TEST(ScenarioTest, InexactNoiseIsElementwiseRoot) {
  const Scenario s = linear_cv_scenario();
  const StackedCovariance r = inexact_noise(s);
  EXPECT_DOUBLE_EQ(r.block(0, 0)(0, 0), 100.0);
  EXPECT_DOUBLE_EQ(r.block(1, 1)(1, 1), 20.0);
  EXPECT_TRUE(r.block(0, 1).isZero(0.0));
  EXPECT_DOUBLE_EQ(inexact_motion(s).q, 5.0);
}

TEST(ScenarioTest, MismatchedInexactSourcesRejected) {
  Scenario s = linear_cv_scenario();
  s.inexact.noise_sources = {1, 1, 2, 3};
  EXPECT_THROW(inexact_noise(s), std::invalid_argument);
}

TEST(ScenarioTest, NonlinearJammerSharesSpeedComponent) {
  const StackedCovariance r = nominal_noise(nonlinear_ct_scenario());
  // Sensors 1 and 2 both pick jammer row 2 (15^2) for their speed channel.
  EXPECT_DOUBLE_EQ(r.block(0, 1)(1, 1), 4.0 * 225.0);
  EXPECT_DOUBLE_EQ(r.block(0, 1)(0, 0), 0.0);
}

TEST(ScenarioTest, TimeVaryingNoise) {
  const Scenario s = timevarying_scenario();
  const Matrix base = nominal_noise(s).full();
  EXPECT_TRUE(true_noise(s, 50).full().isApprox(1.5 * base));
  EXPECT_TRUE(true_noise(s, 25).full().isApprox(0.5 * base));
  EXPECT_TRUE(true_noise(linear_cv_scenario(), 25).full().isApprox(base));
}

TEST(ScenarioTest, YamlRoundTrip) {
  for (const auto& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    const std::string text = dump_scenario_yaml(s);
    const Scenario back = parse_scenario_yaml(text);
    EXPECT_EQ(dump_scenario_yaml(back), text) << name;
    EXPECT_LT(relative_frobenius(nominal_noise(back).full(), nominal_noise(s).full()), 1e-14) << name;
    EXPECT_NEAR(back.motion.omega, s.motion.omega, 1e-15);
  }
}

TEST(ScenarioTest, AnglesInFileAreDegrees) {
  const std::string text = dump_scenario_yaml(nonlinear_ct_scenario());
  EXPECT_NE(text.find("turn_rate_deg: 2.86478897565411"), std::string::npos);
  EXPECT_NE(text.find("noise_std: [1, 15]"), std::string::npos) << text;
}

TEST(ScenarioTest, UnknownKeySuggestsNearest) {
  std::string text = dump_scenario_yaml(linear_cv_scenario());
  text.replace(text.find("steps:"), 6, "stpes:");
  try {
    parse_scenario_yaml(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("did you mean 'steps'"), std::string::npos) << e.what();
  }
}

TEST(ScenarioTest, FingerprintIsStableAndSensitive) {
  EXPECT_EQ(scenario_fingerprint(linear_cv_scenario()), scenario_fingerprint(linear_cv_scenario()));
  EXPECT_NE(scenario_fingerprint(linear_cv_scenario()), scenario_fingerprint(timevarying_scenario()));
  EXPECT_EQ(scenario_fingerprint(linear_cv_scenario()).size(), 64u);
}

TEST(ConfigKeysTest, EditDistance) {
  EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(nearest_key("sedd", {"seed", "steps"}), "seed");
  EXPECT_EQ(nearest_key("zzzzzzzz", {"seed", "steps"}), "");
}

}  // namespace
}  // namespace infofuse
