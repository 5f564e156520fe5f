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

#include "infofuse/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace infofuse {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("infofuse_dataset_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(DatasetTest, DefaultSizesAndShapes) {
  const Scenario s = builtin_scenario("linear-cv");
  const Dataset d = generate_dataset(s, SplitSizes{}, 3);
  ASSERT_EQ(d.train.size(), 100u);
  ASSERT_EQ(d.cv.size(), 20u);
  ASSERT_EQ(d.test.size(), 40u);
  for (const auto* split : {&d.train, &d.cv, &d.test}) {
    for (const auto& t : *split) {
      EXPECT_EQ(t.steps(), 50);
      ASSERT_EQ(t.measurements.size(), 4u);
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(t.measurements[j].rows(), 50);
        EXPECT_EQ(t.measurements[j].cols(), s.sensors[j].measurement_dim());
      }
    }
  }
}

TEST(DatasetTest, NearNoiselessMeasurementsMatchTruth) {
  // Covariances must stay positive definite, so "no noise" is 1e-30.
  Scenario s = builtin_scenario("nonlinear-ct");
  s.motion.q = 0.0;
  for (auto& sensor : s.sensors) sensor.noise_cov *= 1e-30;
  s.jammer.r0 *= 1e-30;
  const Trajectory t = simulate_trajectory(s, 11, 0);
  Vector x = s.x0;
  for (int k = 1; k <= t.steps(); ++k) {
    x = propagate(s.motion, x);
    EXPECT_LT((t.state(k) - x).norm(), 1e-9 * x.norm());
    const auto z = t.measurements_at(k);
    for (std::size_t j = 0; j < s.num_sensors(); ++j) {
      EXPECT_LT((z[j] - measure(s.sensors[j], t.state(k))).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(DatasetTest, TrajectoriesDependOnSeedAndIndexOnly) {
  const Scenario s = builtin_scenario("linear-cv");
  const Dataset d = generate_dataset(s, {3, 1, 2}, 9, 2);
  EXPECT_EQ(d.cv[0].truth, simulate_trajectory(s, 9, 3).truth);
  EXPECT_EQ(d.test[1].measurements[2], simulate_trajectory(s, 9, 5).measurements[2]);
  EXPECT_NE(simulate_trajectory(s, 9, 0).truth, simulate_trajectory(s, 10, 0).truth);
  EXPECT_NE(simulate_trajectory(s, 9, 0).truth, simulate_trajectory(s, 9, 1).truth);
}

TEST(DatasetTest, SameSeedGivesByteIdenticalFiles) {
  const Scenario s = builtin_scenario("nonlinear-ct");
  const fs::path a = fresh_dir("a"), b = fresh_dir("b");
  const std::string ha = save_dataset(generate_dataset(s, {2, 1, 1}, 4), s, a);
  const std::string hb = save_dataset(generate_dataset(s, {2, 1, 1}, 4, 3), s, b);
  EXPECT_EQ(ha, hb);
  for (const char* f : {"train/traj_0000.csv", "train/traj_0001.csv", "cv/traj_0000.csv", "test/traj_0000.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(DatasetTest, SaveLoadRoundTripsExactly) {
  const Scenario s = builtin_scenario("nonlinear-ct");
  const fs::path dir = fresh_dir("roundtrip");
  const Dataset d = generate_dataset(s, {2, 1, 2}, 21);
  save_dataset(d, s, dir);
  const Dataset back = load_dataset(dir, s);
  EXPECT_EQ(back.seed, 21u);
  EXPECT_EQ(back.sizes.test, 2);
  ASSERT_EQ(back.test.size(), 2u);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(back.test[l].truth, d.test[l].truth);
    for (std::size_t j = 0; j < s.num_sensors(); ++j) EXPECT_EQ(back.test[l].measurements[j], d.test[l].measurements[j]);
  }
  fs::remove_all(dir);
}

TEST(DatasetTest, LoadRejectsOtherScenario) {
  const Scenario s = builtin_scenario("linear-cv");
  const fs::path dir = fresh_dir("other");
  save_dataset(generate_dataset(s, {1, 1, 1}, 2), s, dir);
  EXPECT_THROW(load_dataset(dir, builtin_scenario("nonlinear-ct")), std::runtime_error);
  fs::remove_all(dir);
}

TEST(DatasetTest, MalformedCsvNamesThePath) {
  const Scenario s = builtin_scenario("linear-cv");
  const fs::path dir = fresh_dir("corrupt");
  save_dataset(generate_dataset(s, {1, 1, 1}, 2), s, dir);
  std::ofstream(dir / "cv" / "traj_0000.csv") << "step,x0\n1,abc\n";
  try {
    load_dataset(dir, s);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("traj_0000.csv"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(DatasetTest, RemeasureKeepsTruthAndScalesNoise) {
  Scenario s = builtin_scenario("linear-cv");
  const Trajectory base = simulate_trajectory(s, 5, 7);
  const Trajectory same = remeasure(s, base, 5, 7);
  EXPECT_EQ(same.measurements[0], base.measurements[0]);
  s.time_variation.sigma = 0.5;
  const Trajectory varied = remeasure(s, base, 5, 7);
  EXPECT_EQ(varied.truth, base.truth);
  // At k = period the scale is 1 + sigma, so the noise grows by sqrt(1.5).
  const int k = s.time_variation.period;
  const Vector x = base.state(k);
  const Vector w0 = base.measurements_at(k)[2] - measure(s.sensors[2], x);
  const Vector w1 = varied.measurements_at(k)[2] - measure(s.sensors[2], x);
  EXPECT_NEAR((w1 - std::sqrt(1.5) * w0).norm(), 0.0, 1e-9 * w0.norm());
}

}  // namespace
}  // namespace infofuse
