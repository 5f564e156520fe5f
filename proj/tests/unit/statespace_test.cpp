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

#include "infofuse/statespace.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace infofuse {
namespace {

Vector state(std::initializer_list<double> v) {
  Vector s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s(i++) = x;
  return s;
}

MotionModel turn(double omega) {
  MotionModel m;
  m.kind = MotionKind::kCoordinatedTurn;
  m.omega = omega;
  return m;
}

SensorModel azimuth_sensor() {
  SensorModel s;
  s.id = 1;
  s.kind = MeasurementKind::kAzimuthSpeed;
  s.position = Eigen::Vector3d(-5500.0, 1000.0, 0.0);
  s.noise_cov = Matrix::Identity(2, 2);
  return s;
}

SensorModel range_sensor() {
  SensorModel s = azimuth_sensor();
  s.id = 2;
  s.kind = MeasurementKind::kRangeSpeed;
  s.position = Eigen::Vector3d(-5000.0, 0.0, 0.0);
  return s;
}

TEST(MotionTest, ConstantVelocityStep) {
  const Vector x = cv_transition(state({0, 100, 0, 100, 0, 100}), 1.0);
  EXPECT_EQ(x, state({100, 100, 100, 100, 100, 100}));
}

TEST(MotionTest, CoordinatedTurnWithCrossVelocity) {
  // x' = x + sin(wT)/w vx - (1 - cos(wT))/w vy.
  const Vector x = ct_transition(state({0, 100, 0, 100, 0, 100}), 0.05, 1.0);
  const double s = std::sin(0.05) / 0.05;
  const double c = (1.0 - std::cos(0.05)) / 0.05;
  EXPECT_NEAR(x(0), 100.0 * s - 100.0 * c, 1e-12);
  EXPECT_NEAR(x(0), 97.45886, 1e-4);
  EXPECT_NEAR(x(2), 100.0 * c + 100.0 * s, 1e-12);
  EXPECT_NEAR(x(4), 100.0, 1e-12);
}

TEST(MotionTest, CoordinatedTurnWithoutCrossVelocity) {
  const Vector x = ct_transition(state({0, 100, 0, 0, 0, 100}), 0.05, 1.0);
  EXPECT_NEAR(x(0), 99.9583, 1e-4);
}

TEST(MotionTest, CoordinatedTurnPreservesSpeed) {
  const Vector x0 = state({1, 30, -2, 40, 5, 7});
  const Vector x = ct_transition(x0, 0.3, 2.0);
  EXPECT_NEAR(std::hypot(x(1), x(3)), 50.0, 1e-12);
  EXPECT_DOUBLE_EQ(x(5), 7.0);
}

TEST(MotionTest, CoordinatedTurnContinuousAtZeroRate) {
  const Vector x0 = state({1, 30, -2, 40, 5, 7});
  const Vector cv = cv_transition(x0, 1.0);
  for (double w : {1e-2, 1e-3, 9.99e-4, 1e-4, 1e-8, 0.0}) {
    EXPECT_LT((ct_transition(x0, w, 1.0) - cv).norm(), 60.0 * w + 1e-12) << w;
  }
  // Both sides of the series switch agree.
  EXPECT_LT((ct_transition(x0, 1.0001e-3, 1.0) - ct_transition(x0, 0.9999e-3, 1.0)).norm(), 1e-4);
}

TEST(MotionTest, JacobianMatchesFiniteDifference) {
  const Vector x0 = state({10, 3, -5, 4, 2, 1});
  for (const MotionModel& m : {MotionModel{}, turn(0.05), turn(-0.4)}) {
    const Matrix numeric = testing::numeric_jacobian([&](const Vector& x) { return propagate(m, x); }, x0);
    EXPECT_LT((motion_jacobian(m, x0) - numeric).norm(), 1e-7);
  }
}

TEST(MotionTest, ConstantVelocityNoise) {
  MotionModel m;
  m.q = 2.0;
  const Matrix q = process_noise_cov(m);
  EXPECT_DOUBLE_EQ(q(0, 0), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(q(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(q(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(q(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(q(4, 5), 2.0);
}

TEST(MotionTest, TurnNoiseValues) {
  const Matrix q = process_noise_cov(turn(0.05));
  const double w = 0.05;
  EXPECT_NEAR(q(0, 0), 2.0 * (w - std::sin(w)) / (w * w * w), 1e-9);
  EXPECT_NEAR(q(0, 0), 0.333292, 1e-6);
  EXPECT_NEAR(q(0, 1), (1.0 - std::cos(w)) / (w * w), 1e-9);
  EXPECT_NEAR(q(0, 3), (w - std::sin(w)) / (w * w), 1e-9);
  EXPECT_NEAR(q(1, 2), -(w - std::sin(w)) / (w * w), 1e-9);
  EXPECT_TRUE(is_symmetric(q, 0.0));
  // Approaches the constant-velocity blocks as the rate vanishes.
  const Matrix q0 = process_noise_cov(turn(1e-7));
  EXPECT_NEAR(q0(0, 0), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(q0(0, 1), 0.5, 1e-6);
}

TEST(MotionTest, RejectsInvalidModel) {
  MotionModel m;
  m.dt = 0.0;
  EXPECT_THROW(validate(m), std::invalid_argument);
  m.dt = 1.0;
  m.q = -1.0;
  EXPECT_THROW(validate(m), std::invalid_argument);
  EXPECT_THROW(motion_kind_from_string("spiral"), std::invalid_argument);
}

TEST(MeasurementTest, AzimuthAndSpeed) {
  const Vector z = measure(azimuth_sensor(), state({-5500, 3, 2000, 4, 0, 100}));
  EXPECT_NEAR(z(0), std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(z(1), 5.0, 1e-15);
}

TEST(MeasurementTest, RangeIgnoresAltitude) {
  const Vector z = measure(range_sensor(), state({-2000, 0, 4000, 0, 9999, 1}));
  EXPECT_NEAR(z(0), 5000.0, 1e-9);
  EXPECT_DOUBLE_EQ(z(1), 0.0);
}

TEST(MeasurementTest, JacobiansMatchFiniteDifference) {
  const Vector x0 = state({275, 10, 275, -12, 275, 10});
  for (const SensorModel& s : {azimuth_sensor(), range_sensor()}) {
    const Matrix numeric = testing::numeric_jacobian([&](const Vector& x) { return measure(s, x); }, x0, 1e-7);
    EXPECT_LT((measurement_jacobian(s, x0) - numeric).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(MeasurementTest, HessiansMatchFiniteDifference) {
  const Vector x0 = state({-300, 7, 800, -2, 10, 1});
  for (const SensorModel& s : {azimuth_sensor(), range_sensor()}) {
    const auto hess = measurement_hessians(s, x0);
    for (int row = 0; row < 2; ++row) {
      const Matrix numeric = testing::numeric_jacobian(
          [&](const Vector& x) -> Vector { return measurement_jacobian(s, x).row(row).transpose(); }, x0, 1e-6);
      EXPECT_LT((hess[row] - numeric).cwiseAbs().maxCoeff(), 1e-8) << "row " << row;
    }
  }
}

TEST(MeasurementTest, ZeroSpeedHasZeroGradient) {
  const Matrix j = measurement_jacobian(range_sensor(), state({0, 0, 0, 0, 0, 5}));
  EXPECT_TRUE(j.row(1).isZero(0.0));
}

TEST(MeasurementTest, SeamInnovationIsWrapped) {
  const SensorModel s = azimuth_sensor();
  Vector z(2), zhat(2);
  z << std::numbers::pi - 0.01, 1.0;
  zhat << -std::numbers::pi + 0.01, 1.0;
  EXPECT_NEAR(innovation(s, z, zhat)(0), -0.02, 1e-12);
  // Range is not an angle.
  EXPECT_NEAR(innovation(range_sensor(), z, zhat)(0), 2.0 * std::numbers::pi - 0.02, 1e-12);
}

TEST(MeasurementTest, SensorLocationIsDomainError) {
  EXPECT_THROW(measure(azimuth_sensor(), state({-5500, 1, 1000, 1, 30, 1})), std::domain_error);
}

TEST(MeasurementTest, LinearSelector) {
  SensorModel s;
  s.selector = Matrix::Zero(2, 6);
  s.selector(0, 4) = 1.0;
  s.selector(1, 5) = 1.0;
  s.noise_cov = Matrix::Identity(2, 2);
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(measure(s, state({1, 2, 3, 4, 5, 6})), state({5, 6}));
  s.selector(1, 4) = 1.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
}

TEST(BeliefTest, Validity) {
  GaussianBelief b{Vector::Zero(2), Matrix::Identity(2, 2)};
  EXPECT_TRUE(is_valid_belief(b));
  b.cov(0, 0) = -1.0;
  EXPECT_FALSE(is_valid_belief(b));
}

}  // namespace
}  // namespace infofuse
