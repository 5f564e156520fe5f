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

#include "infofuse/network.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "infofuse/dataset.hpp"
#include "infofuse/methods.hpp"
#include "infofuse/scenario.hpp"
#include "infofuse/unrolled.hpp"
#include "test_util.hpp"

namespace infofuse {
namespace {

// Two-node, two-state network small enough for exhaustive checks:
// node 0 tracks [p, v] and measures p, node 1 tracks v alone.
struct TinyNetwork {
  NetworkSpec spec;
  Trajectory traj;
};

TinyNetwork tiny_network(int steps, std::uint64_t seed) {
  Matrix f(2, 2);
  f << 1, 1, 0, 1;
  Matrix q(2, 2);
  q << 1.0 / 3, 0.5, 0.5, 1.0;
  q *= 0.1;
  const auto t0 = InternodalTransform::identity(2);
  const auto t1 = InternodalTransform::rows_of_identity(2, {1});
  Matrix c0(1, 2);
  c0 << 1, 0;
  const Matrix c1 = Matrix::Identity(1, 1);
  TinyNetwork net;
  net.spec = network_spec({linear_node_spec(t0, f, q, c0, Matrix::Constant(1, 1, 1.0)),
                           linear_node_spec(t1, f, q, c1, Matrix::Constant(1, 1, 0.5))},
                          GaussianBelief{Vector::Zero(2), 4.0 * Matrix::Identity(2, 2)});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  net.traj.truth.resize(steps, 2);
  net.traj.measurements = {Matrix(steps, 1), Matrix(steps, 1)};
  Vector x(2);
  x << 0.5, 1.0;
  for (int k = 0; k < steps; ++k) {
    x = f * x + 0.3 * Vector::NullaryExpr(2, [&] { return nd(rng); });
    net.traj.truth.row(k) = x.transpose();
    net.traj.measurements[0](k, 0) = x(0) + nd(rng);
    net.traj.measurements[1](k, 0) = x(1) + 0.7 * nd(rng);
  }
  return net;
}

TEST(DifnetShapeTest, ParameterCountForSixStatesFourSensors) {
  const DifnetShape s = DifnetShape::with_factor(6, 4);
  EXPECT_EQ(s.input_dim(), 168);
  EXPECT_EQ(s.output_dim(), 144);
  // 72x168 + 72, three gates of 72x72 + 72x72 + 72, 72x72 + 72, 144x72 + 144.
  EXPECT_EQ(s.num_params(), 12168 + 3 * 10440 + 5256 + 10512);
}

TEST(DifnetShapeTest, RejectsNonPositiveSizes) {
  DifnetShape s = DifnetShape::with_factor(2, 2);
  s.h2 = 0;
  EXPECT_THROW(DifnetModel{s}, std::invalid_argument);
}

TEST(DifnetModelTest, ZeroParametersGiveZeroOutputAndHidden) {
  const DifnetModel model(DifnetShape::with_factor(6, 4));
  Vector hidden;
  std::mt19937_64 rng(1);
  const Vector out = model.forward(testing::random_matrix(168, 1, rng), hidden);
  EXPECT_EQ(out.size(), 144);
  EXPECT_TRUE(out.isZero(0.0));
  EXPECT_TRUE(hidden.isZero(0.0));
}

TEST(DifnetModelTest, ForwardIsDeterministic) {
  const DifnetModel model = DifnetModel::initialized(DifnetShape::with_factor(6, 4), 5);
  std::mt19937_64 rng(2);
  const Vector in = testing::random_matrix(168, 1, rng);
  Vector h1, h2;
  const Vector a = model.forward(in, h1);
  const Vector b = model.forward(in, h2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(h1, h2);
}

TEST(DifnetModelTest, SameSeedSameParameters) {
  const auto s = DifnetShape::with_factor(3, 2);
  EXPECT_EQ(DifnetModel::initialized(s, 9).params(), DifnetModel::initialized(s, 9).params());
  EXPECT_NE(DifnetModel::initialized(s, 9).params(), DifnetModel::initialized(s, 10).params());
}

TEST(DifnetModelTest, InitializationRespectsFanInBounds) {
  const auto s = DifnetShape::with_factor(3, 2);
  const DifnetModel model = DifnetModel::initialized(s, 3, false);
  EXPECT_LE(model.block(ParamBlock::kInW).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(s.input_dim()));
  EXPECT_LE(model.block(ParamBlock::kUz).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(s.h2));
  EXPECT_LE(model.block(ParamBlock::kOutW).cwiseAbs().maxCoeff(), 1.0 / std::sqrt(s.h3));
}

TEST(DifnetModelTest, IdentityAnchorEmitsNearIdentityBlocks) {
  const auto s = DifnetShape::with_factor(6, 4);
  const DifnetModel model = DifnetModel::initialized(s, 3);
  Vector hidden;
  std::mt19937_64 rng(4);
  const Vector out = model.forward(testing::random_matrix(168, 1, rng), hidden);
  for (int j = 0; j < 4; ++j) {
    EXPECT_LT((output_block(out, 6, j) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 0.1);
  }
}

TEST(DifnetModelTest, HiddenStateCarriesAcrossSteps) {
  const DifnetModel model = DifnetModel::initialized(DifnetShape::with_factor(2, 2), 6, false);
  const Vector in = Vector::Ones(12);
  Vector h;
  const Vector first = model.forward(in, h);
  const Vector second = model.forward(in, h);
  EXPECT_GT((first - second).norm(), 0.0);
}

TEST(DifnetModelTest, OutputBlocksAreRowMajor) {
  Vector out(8);
  out << 1, 2, 3, 4, 5, 6, 7, 8;
  const Matrix b = output_block(out, 2, 1);
  EXPECT_EQ(b(0, 1), 6.0);
  EXPECT_EQ(b(1, 0), 7.0);
}

class EncodeInputsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    scenario_ = linear_cv_scenario();
    graph_ = build_graph(scenario_.transforms);
    std::mt19937_64 rng(8);
    for (const auto& t : scenario_.transforms) {
      const Eigen::Index mj = t.local_dim();
      contributions_.push_back({testing::random_matrix(mj, 1, rng), testing::random_spd(mj, rng)});
    }
  }

  Scenario scenario_;
  CommunicationGraph graph_;
  std::vector<InfoContribution> contributions_;
};

TEST_F(EncodeInputsTest, NodeOneSeesSensorsOneToThree) {
  const Vector in = encode_inputs(contributions_, graph_, 0, 6);
  ASSERT_EQ(in.size(), 168);
  for (int j = 0; j < 3; ++j) EXPECT_GT(in.segment(j * 42, 42).norm(), 0.0) << "slot " << j;
  EXPECT_TRUE(in.segment(3 * 42, 42).isZero(0.0));
}

TEST_F(EncodeInputsTest, SensorFourLiftOccupiesVerticalComponents) {
  const Vector in = encode_inputs(contributions_, graph_, 3, 6);
  const Vector lifted = in.segment(3 * 42, 6);
  EXPECT_TRUE(lifted.head(4).isZero(0.0));
  EXPECT_EQ(lifted.tail(2), contributions_[3].i_vec);
  const Matrix placed = unflatten_row_major(in.segment(3 * 42 + 6, 36), 6, 6);
  EXPECT_EQ(placed.bottomRightCorner(2, 2), contributions_[3].I_mat);
  EXPECT_DOUBLE_EQ(placed.topLeftCorner(4, 6).cwiseAbs().sum(), 0.0);
}

TEST_F(EncodeInputsTest, IsolatedNodeFillsOnlyItsOwnSlot) {
  const std::vector<InternodalTransform> ts = {InternodalTransform::rows_of_identity(6, {0, 1}),
                                               InternodalTransform::rows_of_identity(6, {4, 5})};
  const CommunicationGraph g = build_graph(ts);
  std::vector<InfoContribution> c = {contributions_[3], contributions_[3]};
  const Vector in = encode_inputs(c, g, 0, 6);
  EXPECT_GT(in.segment(0, 42).norm(), 0.0);
  EXPECT_TRUE(in.segment(42, 42).isZero(0.0));
}

TEST(DifnetWeightsTest, ZeroNetworkAddsNothing) {
  const Scenario s = linear_cv_scenario();
  const Trajectory traj = simulate_trajectory(s, 3, 0);
  const auto spec = method_spec(s, Method::kDifnet);
  std::vector<DifnetModel> zero(4, DifnetModel(DifnetShape::with_factor(6, 4)));
  DifnetWeights w(zero);
  DecentralizedFilter filter(local_models(s, spec), &w);
  filter.reset(s.initial_belief);
  filter.step(1, traj.measurements_at(1));
  for (std::size_t j = 0; j < 4; ++j) {
    const GaussianBelief& prior = filter.last_local()[j].state.prior;
    const GaussianBelief& post = filter.posteriors()[j];
    EXPECT_LT((post.mean - prior.mean).norm(), 1e-9 * (1.0 + prior.mean.norm()));
    EXPECT_LT(relative_frobenius(post.cov, prior.cov, 1e-12), 1e-9);
  }
}

TEST(UnrolledTest, TapeForwardMatchesDecentralizedFilter) {
  const Scenario s = linear_cv_scenario();
  const Trajectory traj = simulate_trajectory(s, 4, 2);
  const auto spec = method_spec(s, Method::kDifnet);
  const auto locals = local_models(s, spec);
  std::vector<DifnetModel> models;
  for (int j = 0; j < 4; ++j) {
    models.push_back(DifnetModel::initialized(DifnetShape::with_factor(6, 4), 11));
    models.back().input_scale().setConstant(1e-2);
  }
  const auto losses = trajectory_loss(network_spec(locals, s.initial_belief), models, traj);

  DifnetWeights w(models);
  DecentralizedFilter filter(locals, &w);
  filter.reset(s.initial_belief);
  std::vector<double> expected(4, 0.0);
  for (int k = 1; k <= traj.steps(); ++k) {
    filter.step(k, traj.measurements_at(k));
    for (std::size_t j = 0; j < 4; ++j) {
      const Vector target = s.transforms[j].matrix() * traj.state(k);
      expected[j] += (target - filter.posteriors()[j].mean).squaredNorm() / traj.steps();
    }
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(losses[j], expected[j], 1e-8 * expected[j]) << "node " << j;
}

TEST(UnrolledTest, NonlinearTapeForwardMatchesDecentralizedFilter) {
  const Scenario s = nonlinear_ct_scenario();
  const Trajectory traj = simulate_trajectory(s, 4, 1);
  const auto locals = local_models(s, method_spec(s, Method::kDifnet));
  std::vector<DifnetModel> models(4, DifnetModel::initialized(DifnetShape::with_factor(6, 4), 12));
  for (auto& m : models) m.input_scale().setConstant(1e-3);
  const auto losses = trajectory_loss(network_spec(locals, s.initial_belief), models, traj);
  DifnetWeights w(models);
  DecentralizedFilter filter(locals, &w);
  filter.reset(s.initial_belief);
  std::vector<double> expected(4, 0.0);
  for (int k = 1; k <= traj.steps(); ++k) {
    filter.step(k, traj.measurements_at(k));
    for (std::size_t j = 0; j < 4; ++j) {
      expected[j] += (s.transforms[j].matrix() * traj.state(k) - filter.posteriors()[j].mean).squaredNorm() /
                     traj.steps();
    }
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(losses[j], expected[j], 1e-7 * expected[j]) << "node " << j;
}

// Central differences of the unrolled loss against the exact-mode gradient.
TEST(UnrolledTest, ExactGradientMatchesFiniteDifferences) {
  const TinyNetwork net = tiny_network(10, 21);
  std::vector<DifnetModel> models;
  for (int j = 0; j < 2; ++j) models.push_back(DifnetModel::initialized(DifnetShape::with_factor(2, 2), 30 + j));
  const TrajectoryGradient g = trajectory_gradient(net.spec, models, net.traj, GradientMode::kExact);
  std::mt19937_64 rng(5);
  for (int node = 0; node < 2; ++node) {
    std::uniform_int_distribution<Eigen::Index> pick(0, models[node].params().size() - 1);
    for (int trial = 0; trial < 15; ++trial) {
      const Eigen::Index p = pick(rng);
      // Five-point central stencil: truncation O(h^4) at a step large
      // enough to keep round-off in the loss well below the tolerance.
      const double h = 1e-3;
      auto at = [&](double delta) {
        auto shifted = models;
        shifted[node].params()(p) += delta;
        return trajectory_loss(net.spec, shifted, net.traj)[node];
      };
      const double fd = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
      const double an = g.grads[node](p);
      EXPECT_LE(std::abs(an - fd), 1e-5 * std::max({std::abs(an), std::abs(fd), 1e-6}))
          << "node " << node << " param " << p << " analytic " << an << " fd " << fd;
    }
  }
}

TEST(UnrolledTest, LocalAndExactAgreeWithoutCommunication) {
  TinyNetwork net = tiny_network(6, 3);
  // Node 1 now tracks nothing shared with node 0's measured state: give each
  // node the same identity transform but cut the link by using a network of
  // one node.
  NetworkSpec single = network_spec({net.spec.nodes[0]}, net.spec.initial);
  Trajectory traj = net.traj;
  traj.measurements.resize(1);
  std::vector<DifnetModel> models = {DifnetModel::initialized(DifnetShape::with_factor(2, 1), 2)};
  const auto local = trajectory_gradient(single, models, traj, GradientMode::kLocal);
  const auto exact = trajectory_gradient(single, models, traj, GradientMode::kExact);
  EXPECT_LT((local.grads[0] - exact.grads[0]).norm(), 1e-12 * (1.0 + exact.grads[0].norm()));
}

TEST(UnrolledTest, DeadInputSlotGetsZeroGradient) {
  const Scenario s = linear_cv_scenario();
  const Trajectory traj = simulate_trajectory(s, 6, 0);
  const auto locals = local_models(s, method_spec(s, Method::kDifnet));
  std::vector<DifnetModel> models(4, DifnetModel::initialized(DifnetShape::with_factor(6, 4), 13));
  for (auto& m : models) m.input_scale().setConstant(1e-2);
  Trajectory shortened = traj;
  shortened.truth = traj.truth.topRows(5);
  for (auto& z : shortened.measurements) z = z.topRows(5).eval();
  const auto g = trajectory_gradient(network_spec(locals, s.initial_belief), models, shortened);
  const auto layout = param_layout(models[0].shape());
  // Node 1 never hears from sensor 4: columns 126..167 of its input layer.
  const BlockLayout& in_w = layout[static_cast<int>(ParamBlock::kInW)];
  const Eigen::Map<const Matrix> gw(g.grads[0].data() + in_w.offset, in_w.rows, in_w.cols);
  EXPECT_DOUBLE_EQ(gw.rightCols(42).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(gw.leftCols(126).cwiseAbs().maxCoeff(), 0.0);
}

TEST(UnrolledTest, LossOfPerfectEstimatesIsZero) {
  // One step, a node that measures its full state with negligible noise.
  TinyNetwork net = tiny_network(1, 4);
  NodeSpec n = net.spec.nodes[0];
  n.noise_cov = 1e-14 * Matrix::Identity(2, 2);
  const Matrix c = Matrix::Identity(2, 2);
  n.measure = [c](const Vector& x) -> Vector { return c * x; };
  n.jacobian = [c](const Vector&) -> Matrix { return c; };
  n.angular = {false, false};
  NetworkSpec spec = network_spec({n}, net.spec.initial);
  Trajectory traj;
  traj.truth = net.traj.truth;
  traj.measurements = {traj.truth};
  DifnetModel model(DifnetShape::with_factor(2, 1));
  auto out_b = model.block(ParamBlock::kOutB);
  out_b << 1, 0, 0, 1;
  EXPECT_NEAR(trajectory_loss(spec, {model}, traj)[0], 0.0, 1e-12);
}

}  // namespace
}  // namespace infofuse
