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

#include "infofuse/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "infofuse/checkpoint.hpp"
#include "infofuse/methods.hpp"

namespace infofuse {
namespace {

TEST(AdamTest, ZeroGradientWithoutDecayLeavesParameters) {
  TrainingConfig c;
  AdamState s;
  Vector p = Vector::LinSpaced(5, -1.0, 1.0);
  const Vector before = p;
  adam_step(s, p, Vector::Zero(5), 1e-3, c);
  EXPECT_EQ(p, before);
}

TEST(AdamTest, FirstStepMovesByLearningRateAgainstGradientSign) {
  TrainingConfig c;
  AdamState s;
  Vector p = Vector::Zero(3);
  Vector g(3);
  g << 3.0, -0.2, 1e-3;
  adam_step(s, p, g, 1e-2, c);
  EXPECT_NEAR(p(0), -1e-2, 1e-9);
  EXPECT_NEAR(p(1), 1e-2, 1e-9);
  EXPECT_NEAR(p(2), -1e-2, 1e-7);
}

TEST(AdamTest, TwoStepScalarTrace) {
  // g = 0.5 twice, lr = 0.1: m-hat = 0.5 and v-hat = 0.25 on both steps, so
  // each step moves by 0.1 * 0.5 / (0.5 + 1e-8).
  TrainingConfig c;
  AdamState s;
  Vector p = Vector::Ones(1);
  const Vector g = Vector::Constant(1, 0.5);
  adam_step(s, p, g, 0.1, c);
  EXPECT_NEAR(p(0), 0.900000002, 1e-15);
  adam_step(s, p, g, 0.1, c);
  EXPECT_NEAR(p(0), 0.800000004, 1e-15);
  EXPECT_EQ(s.step, 2);
}

TEST(AdamTest, DecoupledDecayShrinksParameters) {
  TrainingConfig c;
  c.decoupled_decay = 0.1;
  AdamState s;
  Vector p = Vector::Constant(1, 2.0);
  adam_step(s, p, Vector::Zero(1), 0.5, c);
  EXPECT_DOUBLE_EQ(p(0), 2.0 - 0.5 * 0.1 * 2.0);
}

TEST(LearningRateTest, CyclicTriangle) {
  TrainingConfig c;
  c.schedule.kind = LrSchedule::Kind::kCyclic;
  c.schedule.lr_min = 1e-4;
  c.schedule.lr_max = 1e-3;
  c.schedule.period = 10;
  EXPECT_DOUBLE_EQ(learning_rate_at(c, 0), 1e-4);
  EXPECT_DOUBLE_EQ(learning_rate_at(c, 5), 1e-3);
  EXPECT_DOUBLE_EQ(learning_rate_at(c, 10), 1e-4);
  c.schedule.kind = LrSchedule::Kind::kFixed;
  EXPECT_DOUBLE_EQ(learning_rate_at(c, 5), c.learning_rate);
}

TEST(TrainingConfigTest, RejectsBatchLargerThanData) {
  TrainingConfig c;
  EXPECT_THROW(validate(c, 10), std::invalid_argument);
  c.batch_size = 10;
  EXPECT_NO_THROW(validate(c, 10));
  c.learning_rate = 0.0;
  EXPECT_THROW(validate(c, 10), std::invalid_argument);
}

TEST(EpochOrderTest, DeterministicPermutation) {
  const auto a = epoch_order(7, 3, 50);
  EXPECT_EQ(a, epoch_order(7, 3, 50));
  EXPECT_NE(a, epoch_order(7, 4, 50));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

class SmallTrainingTest : public ::testing::Test {
 protected:
  void SetUp() override {
    scenario_ = linear_cv_scenario();
    scenario_.steps = 12;
    dataset_ = generate_dataset(scenario_, {4, 2, 2}, 3);
    config_.batch_size = 2;
    config_.hidden_factor = 1;
    config_.epochs = 2;
    config_.seed = 5;
    config_.scale_trajectories = 2;
  }

  Scenario scenario_;
  Dataset dataset_;
  TrainingConfig config_;
};

TEST_F(SmallTrainingTest, ZeroEpochsReturnsInitialModels) {
  config_.epochs = 0;
  TrainingState st = initial_training_state(scenario_, dataset_, config_);
  const auto initial = st.models;
  train(st, scenario_, dataset_, config_);
  EXPECT_EQ(st.epoch, 0);
  EXPECT_EQ(st.best_epoch, 0);
  for (std::size_t i = 0; i < initial.size(); ++i) EXPECT_EQ(st.best_models[i].params(), initial[i].params());
  EXPECT_EQ(st.history.size(), 4u);
}

TEST_F(SmallTrainingTest, SymmetricSensorsTrainIdentically) {
  TrainingState st = initial_training_state(scenario_, dataset_, config_);
  train(st, scenario_, dataset_, config_);
  EXPECT_NE(st.models[0].params(), st.optimizers[0].m);  // sanity: state moved
  EXPECT_EQ(st.models[0].params(), st.models[1].params());
  EXPECT_NE(st.models[0].params(), st.models[2].params());
}

TEST_F(SmallTrainingTest, RunsAreReproducibleAndThreadCountDoesNotMatter) {
  TrainingState a = initial_training_state(scenario_, dataset_, config_);
  train(a, scenario_, dataset_, config_);
  config_.threads = 3;
  TrainingState b = initial_training_state(scenario_, dataset_, config_);
  train(b, scenario_, dataset_, config_);
  for (std::size_t i = 0; i < a.models.size(); ++i) EXPECT_EQ(a.models[i].params(), b.models[i].params());
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t r = 0; r < a.history.size(); ++r) EXPECT_EQ(a.history[r].cv_loss, b.history[r].cv_loss);
}

TEST_F(SmallTrainingTest, ResumeReproducesUninterruptedRun) {
  TrainingState straight = initial_training_state(scenario_, dataset_, config_);
  train(straight, scenario_, dataset_, config_);

  const auto dir = std::filesystem::temp_directory_path() / "infofuse_resume_test";
  std::filesystem::remove_all(dir);
  TrainingConfig first = config_;
  first.epochs = 1;
  TrainingState part = initial_training_state(scenario_, dataset_, first);
  train(part, scenario_, dataset_, first);
  save_training(dir, part, {{"seed", "5"}});
  TrainingState resumed = load_training(dir, 4);
  train(resumed, scenario_, dataset_, config_);
  std::filesystem::remove_all(dir);

  EXPECT_EQ(resumed.epoch, 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(resumed.models[i].params(), straight.models[i].params());
  ASSERT_EQ(resumed.history.size(), straight.history.size());
  for (std::size_t r = 0; r < straight.history.size(); ++r) {
    EXPECT_EQ(resumed.history[r].train_loss, straight.history[r].train_loss);
    EXPECT_EQ(resumed.history[r].cv_loss, straight.history[r].cv_loss);
  }
}

TEST_F(SmallTrainingTest, PenaltyIsGammaTimesSquaredNorm) {
  TrainingState st = initial_training_state(scenario_, dataset_, config_);
  EXPECT_DOUBLE_EQ(st.history[0].penalty, config_.gamma * st.models[0].params().squaredNorm());
}

TEST_F(SmallTrainingTest, InputScalesNormalizeObservedFeatures) {
  const auto scales = input_scales(scenario_, dataset_.train);
  ASSERT_EQ(scales.size(), 4u);
  // Node 1 never sees sensor 4: that slot keeps unit scale.
  EXPECT_TRUE((scales[0].tail(42).array() == 1.0).all());
  EXPECT_TRUE((scales[0].head(126).array() > 0.0).all());
}

TEST(HiddenResetTest, EstimatesDoNotDependOnPreviousTrajectory) {
  const Scenario s = linear_cv_scenario();
  const Trajectory a = simulate_trajectory(s, 2, 0);
  const Trajectory b = simulate_trajectory(s, 2, 1);
  const std::vector<DifnetModel> models(4, DifnetModel::initialized(DifnetShape::with_factor(6, 4), 1));
  MethodRunner warm(s, Method::kDifnet, &models);
  warm.run(a);
  const auto after_a = warm.run(b);
  MethodRunner fresh(s, Method::kDifnet, &models);
  const auto alone = fresh.run(b);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(after_a.means[j], alone.means[j]);
}

TEST(CheckpointTest, ModelRoundTripIsExact) {
  DifnetModel m = DifnetModel::initialized(DifnetShape::with_factor(3, 2), 4);
  m.input_scale().setLinSpaced(0.5, 2.0);
  const std::string bytes = serialize_model(m);
  EXPECT_EQ(bytes.substr(0, 4), "DIFN");
  const DifnetModel back = deserialize_model(bytes);
  EXPECT_EQ(back.shape(), m.shape());
  EXPECT_EQ(back.params(), m.params());
  EXPECT_EQ(back.input_scale(), m.input_scale());
  EXPECT_EQ(serialize_model(back), bytes);
}

TEST(CheckpointTest, RejectsCorruptFiles) {
  const std::string bytes = serialize_model(DifnetModel(DifnetShape::with_factor(2, 2)));
  EXPECT_THROW(deserialize_model("XXXX" + bytes.substr(4)), std::runtime_error);
  EXPECT_THROW(deserialize_model(bytes.substr(0, bytes.size() - 3)), std::runtime_error);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_THROW(deserialize_model(bad_version), std::runtime_error);
}

TEST(CheckpointTest, HeaderIsLittleEndian) {
  const std::string bytes = serialize_model(DifnetModel(DifnetShape::with_factor(2, 3)));
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kModelFormatVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);   // m
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3);  // N
}

TEST(CheckpointTest, ManifestRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "infofuse_manifest_test.txt";
  write_manifest(path, {{"seed", "7"}, {"scenario", "linear-cv"}});
  const auto back = read_manifest(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.at("seed"), "7");
  EXPECT_EQ(back.at("scenario"), "linear-cv");
}

}  // namespace
}  // namespace infofuse
