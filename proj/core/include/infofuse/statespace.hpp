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

// Target motion and sensor measurement models.
//
// States are ordered [x, vx, y, vy, z, vz] in meters and meters/second.
// Angles are radians everywhere inside the library.

#ifndef INFOFUSE_STATESPACE_HPP_
#define INFOFUSE_STATESPACE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "infofuse/linalg.hpp"

namespace infofuse {

inline constexpr int kStateDim = 6;

struct GaussianBelief {
  Vector mean;
  Matrix cov;

  Eigen::Index dim() const { return mean.size(); }
};

// Symmetric to 1e-9 relative and PSD up to round-off.
bool is_valid_belief(const GaussianBelief& belief, double rel_tol = 1e-9);

enum class MotionKind { kConstantVelocity, kCoordinatedTurn };

struct MotionModel {
  MotionKind kind = MotionKind::kConstantVelocity;
  double dt = 1.0;     // seconds
  double q = 1.0;      // process-noise standard deviation
  double omega = 0.0;  // turn rate rad/s, coordinated turn only
};

void validate(const MotionModel& model);

std::string_view to_string(MotionKind kind);
MotionKind motion_kind_from_string(std::string_view name);

// F for either model; both are linear in the state.
Matrix transition_matrix(const MotionModel& model);

Vector cv_transition(const Vector& state, double dt);
Vector ct_transition(const Vector& state, double omega, double dt);

// f(x) and its Jacobian.
Vector propagate(const MotionModel& model, const Vector& state);
Matrix motion_jacobian(const MotionModel& model, const Vector& state);

Matrix process_noise_cov(const MotionModel& model);

enum class MeasurementKind { kLinearSelector, kAzimuthSpeed, kRangeSpeed };

std::string_view to_string(MeasurementKind kind);
MeasurementKind measurement_kind_from_string(std::string_view name);

struct SensorModel {
  int id = 0;
  MeasurementKind kind = MeasurementKind::kLinearSelector;
  Matrix selector;                                       // linear kind, n x m of 0/1
  Eigen::Vector3d position = Eigen::Vector3d::Zero();   // nonlinear kinds
  Matrix noise_cov;                                      // R^j, n x n

  int measurement_dim() const;
  bool is_linear() const { return kind == MeasurementKind::kLinearSelector; }
};

// Throws std::invalid_argument on shape or definiteness violations.
void validate(const SensorModel& sensor, int state_dim = kStateDim);

// Noise-free measurement h(x). Nonlinear kinds throw std::domain_error when
// the target coincides with the sensor in the horizontal plane.
Vector measure(const SensorModel& sensor, const Vector& state);
Matrix measurement_jacobian(const SensorModel& sensor, const Vector& state);

// Second derivatives of each measurement row, one m x m matrix per row.
std::vector<Matrix> measurement_hessians(const SensorModel& sensor, const Vector& state);

// True for measurement rows that are angles and need wrapping.
std::vector<bool> angular_rows(const SensorModel& sensor);

// z - zhat with angular rows wrapped into (-pi, pi].
Vector innovation(const SensorModel& sensor, const Vector& z, const Vector& zhat);

}  // namespace infofuse

#endif  // INFOFUSE_STATESPACE_HPP_
