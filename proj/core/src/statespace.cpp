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
#include <stdexcept>

#include <fmt/format.h>

namespace infofuse {
namespace {

// Below this |omega * dt| the turn terms use truncated Taylor series, which
// coincide with the constant-velocity limit once |omega * dt| < 1e-8.
constexpr double kSeriesThreshold = 1e-3;

// Horizontal offsets closer than this are treated as coincident.
constexpr double kMinHorizontalRange2 = 1e-12;

struct TurnTerms {
  double sin_over_w;        // sin(wT)/w
  double one_minus_cos_w;   // (1 - cos wT)/w
  double one_minus_cos_w2;  // (1 - cos wT)/w^2
  double wt_minus_sin_w2;   // (wT - sin wT)/w^2
  double wt_minus_sin_w3;   // (wT - sin wT)/w^3
  double cos_wt;
  double sin_wt;
};

TurnTerms turn_terms(double omega, double dt) {
  const double a = omega * dt;
  TurnTerms t{};
  t.cos_wt = std::cos(a);
  t.sin_wt = std::sin(a);
  if (std::abs(a) < kSeriesThreshold) {
    const double a2 = a * a;
    const double a4 = a2 * a2;
    const double dt2 = dt * dt;
    const double dt3 = dt2 * dt;
    t.sin_over_w = dt * (1.0 - a2 / 6.0 + a4 / 120.0);
    t.one_minus_cos_w = dt * a * (0.5 - a2 / 24.0 + a4 / 720.0);
    t.one_minus_cos_w2 = dt2 * (0.5 - a2 / 24.0 + a4 / 720.0);
    t.wt_minus_sin_w2 = dt2 * a * (1.0 / 6.0 - a2 / 120.0 + a4 / 5040.0);
    t.wt_minus_sin_w3 = dt3 * (1.0 / 6.0 - a2 / 120.0 + a4 / 5040.0);
  } else {
    const double w2 = omega * omega;
    t.sin_over_w = t.sin_wt / omega;
    t.one_minus_cos_w = (1.0 - t.cos_wt) / omega;
    t.one_minus_cos_w2 = (1.0 - t.cos_wt) / w2;
    t.wt_minus_sin_w2 = (a - t.sin_wt) / w2;
    t.wt_minus_sin_w3 = (a - t.sin_wt) / (w2 * omega);
  }
  return t;
}

void require_state(const Vector& state) {
  if (state.size() != kStateDim) {
    throw std::invalid_argument(
        fmt::format("state has length {}, expected {}", state.size(), kStateDim));
  }
}

Matrix cv_matrix(double dt) {
  Matrix f = Matrix::Identity(kStateDim, kStateDim);
  for (int axis = 0; axis < 3; ++axis) f(2 * axis, 2 * axis + 1) = dt;
  return f;
}

Matrix ct_matrix(double omega, double dt) {
  const TurnTerms t = turn_terms(omega, dt);
  Matrix f = Matrix::Zero(kStateDim, kStateDim);
  f(0, 0) = 1.0;
  f(0, 1) = t.sin_over_w;
  f(0, 3) = -t.one_minus_cos_w;
  f(1, 1) = t.cos_wt;
  f(1, 3) = -t.sin_wt;
  f(2, 1) = t.one_minus_cos_w;
  f(2, 2) = 1.0;
  f(2, 3) = t.sin_over_w;
  f(3, 1) = t.sin_wt;
  f(3, 3) = t.cos_wt;
  f(4, 4) = 1.0;
  f(4, 5) = dt;
  f(5, 5) = 1.0;
  return f;
}

struct Horizontal {
  double dx;
  double dy;
  double r2;
};

Horizontal horizontal_offset(const SensorModel& sensor, const Vector& state) {
  const double dx = state(0) - sensor.position.x();
  const double dy = state(2) - sensor.position.y();
  const double r2 = dx * dx + dy * dy;
  if (r2 < kMinHorizontalRange2) {
    throw std::domain_error(fmt::format(
        "sensor {}: target coincides with sensor position in the horizontal plane", sensor.id));
  }
  return {dx, dy, r2};
}

}  // namespace

bool is_valid_belief(const GaussianBelief& belief, double rel_tol) {
  return belief.mean.size() == belief.cov.rows() && belief.cov.rows() == belief.cov.cols() &&
         belief.mean.allFinite() && is_psd(belief.cov, rel_tol);
}

void validate(const MotionModel& model) {
  if (!(model.dt > 0.0)) throw std::invalid_argument("motion model: dt must be > 0");
  if (!(model.q >= 0.0)) throw std::invalid_argument("motion model: q must be >= 0");
  if (!std::isfinite(model.omega)) throw std::invalid_argument("motion model: omega not finite");
}

std::string_view to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::kConstantVelocity:
      return "constant-velocity";
    case MotionKind::kCoordinatedTurn:
      return "coordinated-turn";
  }
  return "unknown";
}

MotionKind motion_kind_from_string(std::string_view name) {
  if (name == "constant-velocity" || name == "cv") return MotionKind::kConstantVelocity;
  if (name == "coordinated-turn" || name == "ct") return MotionKind::kCoordinatedTurn;
  throw std::invalid_argument(fmt::format("unknown motion kind '{}'", name));
}

Matrix transition_matrix(const MotionModel& model) {
  validate(model);
  return model.kind == MotionKind::kConstantVelocity ? cv_matrix(model.dt)
                                                     : ct_matrix(model.omega, model.dt);
}

Vector cv_transition(const Vector& state, double dt) {
  require_state(state);
  if (!(dt > 0.0)) throw std::invalid_argument("cv_transition: dt must be > 0");
  return cv_matrix(dt) * state;
}

Vector ct_transition(const Vector& state, double omega, double dt) {
  require_state(state);
  if (!(dt > 0.0)) throw std::invalid_argument("ct_transition: dt must be > 0");
  return ct_matrix(omega, dt) * state;
}

Vector propagate(const MotionModel& model, const Vector& state) {
  require_state(state);
  return transition_matrix(model) * state;
}

Matrix motion_jacobian(const MotionModel& model, const Vector& state) {
  require_state(state);
  return transition_matrix(model);
}

Matrix process_noise_cov(const MotionModel& model) {
  validate(model);
  const double dt = model.dt;
  const double q2 = model.q * model.q;
  Matrix axis(2, 2);
  axis << std::pow(dt, 4) / 3.0, std::pow(dt, 3) / 2.0, std::pow(dt, 3) / 2.0, dt * dt;

  if (model.kind == MotionKind::kConstantVelocity) {
    return q2 * kron(Matrix::Identity(3, 3), axis);
  }

  const TurnTerms t = turn_terms(model.omega, dt);
  Matrix q = Matrix::Zero(kStateDim, kStateDim);
  const double a = 2.0 * t.wt_minus_sin_w3;
  const double b = t.one_minus_cos_w2;
  const double c = t.wt_minus_sin_w2;
  q(0, 0) = a;
  q(0, 1) = b;
  q(0, 3) = c;
  q(1, 0) = b;
  q(1, 1) = dt;
  q(1, 2) = -c;
  q(2, 1) = -c;
  q(2, 2) = a;
  q(2, 3) = b;
  q(3, 0) = c;
  q(3, 2) = b;
  q(3, 3) = dt;
  q.block(4, 4, 2, 2) = axis;
  return q2 * q;
}

std::string_view to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::kLinearSelector:
      return "linear-selector";
    case MeasurementKind::kAzimuthSpeed:
      return "azimuth-speed";
    case MeasurementKind::kRangeSpeed:
      return "range-speed";
  }
  return "unknown";
}

MeasurementKind measurement_kind_from_string(std::string_view name) {
  if (name == "linear-selector" || name == "linear") return MeasurementKind::kLinearSelector;
  if (name == "azimuth-speed") return MeasurementKind::kAzimuthSpeed;
  if (name == "range-speed") return MeasurementKind::kRangeSpeed;
  throw std::invalid_argument(fmt::format("unknown measurement kind '{}'", name));
}

int SensorModel::measurement_dim() const {
  return is_linear() ? static_cast<int>(selector.rows()) : 2;
}

void validate(const SensorModel& sensor, int state_dim) {
  const int n = sensor.measurement_dim();
  if (sensor.is_linear()) {
    if (sensor.selector.cols() != state_dim || n < 1 || n > state_dim) {
      throw std::invalid_argument(fmt::format("sensor {}: selector must be n x {}", sensor.id, state_dim));
    }
    for (Eigen::Index r = 0; r < sensor.selector.rows(); ++r) {
      const auto row = sensor.selector.row(r);
      const bool binary = ((row.array() == 0.0) || (row.array() == 1.0)).all();
      if (!binary || row.sum() != 1.0) {
        throw std::invalid_argument(fmt::format("sensor {}: selector row {} is not a unit row", sensor.id, r));
      }
      for (Eigen::Index s = 0; s < r; ++s) {
        if (sensor.selector.row(s) == row) {
          throw std::invalid_argument(fmt::format("sensor {}: selector rows {} and {} repeat", sensor.id, s, r));
        }
      }
    }
  }
  if (sensor.noise_cov.rows() != n || sensor.noise_cov.cols() != n) {
    throw std::invalid_argument(fmt::format("sensor {}: noise covariance must be {}x{}", sensor.id, n, n));
  }
  if (!is_symmetric(sensor.noise_cov) || Eigen::LLT<Matrix>(sensor.noise_cov).info() != Eigen::Success) {
    throw std::invalid_argument(fmt::format("sensor {}: noise covariance is not symmetric PD", sensor.id));
  }
}

Vector measure(const SensorModel& sensor, const Vector& state) {
  require_state(state);
  if (sensor.is_linear()) return sensor.selector * state;
  const Horizontal off = horizontal_offset(sensor, state);
  Vector z(2);
  z(0) = sensor.kind == MeasurementKind::kAzimuthSpeed ? std::atan2(off.dy, off.dx) : std::sqrt(off.r2);
  z(1) = std::hypot(state(1), state(3));
  return z;
}

Matrix measurement_jacobian(const SensorModel& sensor, const Vector& state) {
  require_state(state);
  if (sensor.is_linear()) return sensor.selector;
  const Horizontal off = horizontal_offset(sensor, state);
  Matrix j = Matrix::Zero(2, kStateDim);
  if (sensor.kind == MeasurementKind::kAzimuthSpeed) {
    j(0, 0) = -off.dy / off.r2;
    j(0, 2) = off.dx / off.r2;
  } else {
    const double r = std::sqrt(off.r2);
    j(0, 0) = off.dx / r;
    j(0, 2) = off.dy / r;
  }
  // Speed gradient; zero at zero horizontal speed where sqrt is not differentiable.
  const double speed = std::hypot(state(1), state(3));
  if (speed > 0.0) {
    j(1, 1) = state(1) / speed;
    j(1, 3) = state(3) / speed;
  }
  return j;
}

std::vector<Matrix> measurement_hessians(const SensorModel& sensor, const Vector& state) {
  require_state(state);
  const int n = sensor.measurement_dim();
  std::vector<Matrix> hess(n, Matrix::Zero(kStateDim, kStateDim));
  if (sensor.is_linear()) return hess;

  const Horizontal off = horizontal_offset(sensor, state);
  const double dx = off.dx;
  const double dy = off.dy;
  Matrix& h0 = hess[0];
  if (sensor.kind == MeasurementKind::kAzimuthSpeed) {
    const double r4 = off.r2 * off.r2;
    h0(0, 0) = 2.0 * dx * dy / r4;
    h0(0, 2) = (dy * dy - dx * dx) / r4;
    h0(2, 0) = h0(0, 2);
    h0(2, 2) = -2.0 * dx * dy / r4;
  } else {
    const double r3 = off.r2 * std::sqrt(off.r2);
    h0(0, 0) = dy * dy / r3;
    h0(0, 2) = -dx * dy / r3;
    h0(2, 0) = h0(0, 2);
    h0(2, 2) = dx * dx / r3;
  }
  const double vx = state(1);
  const double vy = state(3);
  const double speed = std::hypot(vx, vy);
  if (speed > 0.0) {
    const double s3 = speed * speed * speed;
    Matrix& h1 = hess[1];
    h1(1, 1) = vy * vy / s3;
    h1(1, 3) = -vx * vy / s3;
    h1(3, 1) = h1(1, 3);
    h1(3, 3) = vx * vx / s3;
  }
  return hess;
}

std::vector<bool> angular_rows(const SensorModel& sensor) {
  std::vector<bool> rows(sensor.measurement_dim(), false);
  if (sensor.kind == MeasurementKind::kAzimuthSpeed) rows[0] = true;
  return rows;
}

Vector innovation(const SensorModel& sensor, const Vector& z, const Vector& zhat) {
  Vector nu = z - zhat;
  const auto angular = angular_rows(sensor);
  for (std::size_t r = 0; r < angular.size(); ++r) {
    if (angular[r]) nu(static_cast<Eigen::Index>(r)) = wrap_angle(nu(static_cast<Eigen::Index>(r)));
  }
  return nu;
}

}  // namespace infofuse
