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

#include "infofuse/noise.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace infofuse {
namespace {

SensorModel linear(int id, std::vector<int> rows, std::vector<double> var) {
  SensorModel s;
  s.id = id;
  s.selector = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t r = 0; r < rows.size(); ++r) s.selector(static_cast<Eigen::Index>(r), rows[r]) = 1.0;
  s.noise_cov = Eigen::Map<Vector>(var.data(), static_cast<Eigen::Index>(var.size())).asDiagonal();
  return s;
}

struct Fixture {
  std::vector<SensorModel> sensors{linear(1, {0, 1}, {4.0, 1.0}), linear(2, {0, 1, 2}, {9.0, 1.0, 2.0})};
  JammerSpec jammer;

  Fixture() {
    jammer.r0 = Vector::LinSpaced(6, 1.0, 6.0).asDiagonal();
    jammer.betas = {0.5, 2.0};
    jammer.selectors = {sensors[0].selector, sensors[1].selector};
  }
};

TEST(StackedCovarianceTest, BlocksMatchDefinition) {
  Fixture f;
  const StackedCovariance r = stacked_covariance(f.jammer, f.sensors);
  EXPECT_EQ(r.total_dim(), 5);
  EXPECT_EQ(r.offset(1), 2);
  // Cross block: 0.5 * 2 * S1 R0 S2^T.
  EXPECT_DOUBLE_EQ(r.block(0, 1)(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.block(0, 1)(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(r.block(0, 1)(0, 2), 0.0);
  // Diagonal: R^2 + 4 S2 R0 S2^T.
  EXPECT_DOUBLE_EQ(r.block(1, 1)(2, 2), 2.0 + 4.0 * 3.0);
  EXPECT_TRUE(r.block(1, 0).isApprox(r.block(0, 1).transpose()));
  EXPECT_TRUE(is_symmetric(r.full(), 0.0));
}

TEST(StackedCovarianceTest, WithoutCrossTerms) {
  Fixture f;
  const StackedCovariance r = stacked_covariance(f.jammer, f.sensors).without_cross_terms();
  EXPECT_TRUE(r.block(0, 1).isZero(0.0));
  EXPECT_DOUBLE_EQ(r.block(0, 0)(0, 0), 4.0 + 0.25);
}

TEST(StackedCovarianceTest, RejectsShapeErrors) {
  Fixture f;
  f.jammer.betas.pop_back();
  EXPECT_THROW(stacked_covariance(f.jammer, f.sensors), std::invalid_argument);
  Fixture g;
  g.jammer.selectors[0] = Matrix::Zero(3, 6);
  EXPECT_THROW(stacked_covariance(g.jammer, g.sensors), std::invalid_argument);
  EXPECT_THROW(StackedCovariance({2, 2}, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST(StackedCovarianceTest, TimeVaryingScale) {
  Fixture f;
  const StackedCovariance base = stacked_covariance(f.jammer, f.sensors);
  EXPECT_TRUE(time_varying_scale(base, 0, 0.5, 50).full().isApprox(1.5 * base.full()));
  EXPECT_TRUE(time_varying_scale(base, 25, 0.5, 50).full().isApprox(0.5 * base.full()));
  EXPECT_TRUE(time_varying_scale(base, 7, 0.0, 50).full().isApprox(base.full()));
  EXPECT_THROW(time_varying_scale(base, 0, 1.0, 50), std::invalid_argument);
  EXPECT_THROW(time_varying_scale(base, 0, 0.5, 0), std::invalid_argument);
}

TEST(SamplingTest, EmpiricalCovarianceMatches) {
  Fixture f;
  const StackedCovariance r = stacked_covariance(f.jammer, f.sensors);
  Rng rng = make_rng(123, 0);
  constexpr int kDraws = 200000;
  Matrix acc = Matrix::Zero(5, 5);
  Vector mean = Vector::Zero(5);
  for (int i = 0; i < kDraws; ++i) {
    const Vector w = sample_correlated(r, rng);
    acc += w * w.transpose();
    mean += w;
  }
  acc /= kDraws;
  mean /= kDraws;
  // Standard error of each entry is about sqrt(2 / n) times its scale.
  EXPECT_LT(relative_frobenius(acc, r.full()), 0.02);
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.05);
}

TEST(SamplingTest, ZeroCovarianceGivesZero) {
  Rng rng = make_rng(1, 1);
  EXPECT_TRUE(sample_gaussian(Matrix::Zero(3, 3), rng).isZero(0.0));
}

TEST(SamplingTest, StreamsAreDeterministicAndDistinct) {
  Rng a = make_rng(5, 0), b = make_rng(5, 0), c = make_rng(5, 1), d = make_rng(6, 0);
  const Vector va = standard_normal(4, a);
  EXPECT_EQ(va, standard_normal(4, b));
  EXPECT_NE(va, standard_normal(4, c));
  EXPECT_NE(va, standard_normal(4, d));
}

}  // namespace
}  // namespace infofuse
