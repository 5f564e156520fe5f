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

// Local extended Kalman filters and information-form fusion, centralized and
// decentralized, with correlation-aware fusion weights.

#ifndef INFOFUSE_FILTERS_HPP_
#define INFOFUSE_FILTERS_HPP_

#include <map>
#include <string_view>
#include <vector>

#include "infofuse/distribution.hpp"
#include "infofuse/linalg.hpp"
#include "infofuse/noise.hpp"
#include "infofuse/statespace.hpp"

namespace infofuse {

// A node's reduced-order model: the global motion and measurement functions
// seen through T^j. sensor.noise_cov is the R^j the node believes in.
struct LocalModel {
  MotionModel motion;
  SensorModel sensor;
  InternodalTransform transform;

  Vector lift(const Vector& local) const { return transform.pinv() * local; }
  Vector transition(const Vector& local) const;
  Matrix transition_jacobian(const Vector& local) const;
  Matrix process_noise() const;
  Vector predicted_measurement(const Vector& local) const;
  Matrix measurement_jacobian(const Vector& local) const;
};

struct LocalFilterState {
  int sensor_id = 0;
  GaussianBelief prior;
  GaussianBelief posterior;
  Matrix innovation_cov;  // S
  Matrix gain;            // K, m_j x n_j
  Vector predicted_measurement;
  Matrix measurement_jacobian;  // grad c^j at the prior
};

struct InfoContribution {
  Vector i_vec;
  Matrix I_mat;
};

enum class WeightSource { kModelCcmn, kModelCumn, kLearned };

std::string_view to_string(WeightSource source);

// Node index -> weight matrix.
struct FusionWeightSet {
  std::map<int, Matrix> weights;
  WeightSource source = WeightSource::kModelCcmn;
};

GaussianBelief ekf_predict(const GaussianBelief& post_prev, const LocalModel& model);
GaussianBelief ekf_predict(const GaussianBelief& post_prev, const Matrix& transition, const Matrix& process_noise);

// Throws NumericalError when S is not positive definite.
LocalFilterState ekf_update(const GaussianBelief& prior, const Vector& measurement, const LocalModel& model);
LocalFilterState ekf_update(const GaussianBelief& prior, const Vector& measurement, const Matrix& jacobian,
                            const Matrix& noise_cov);
// Shared core: innovation already formed (and wrapped) by the caller.
LocalFilterState ekf_update_with_innovation(const GaussianBelief& prior, const Vector& innovation,
                                            const Matrix& jacobian, const Matrix& noise_cov);

InfoContribution info_contribution(const LocalFilterState& state);

// Rows of the stacked Jacobian owned by sensor j under the block layout of r.
Matrix sensor_rows(const Matrix& stacked_jacobian, const StackedCovariance& r, int j);

// M^j = H^T R^{-1}(*j) R^j (H^j^dagger)^T. Throws std::invalid_argument when
// H^j lacks full row rank.
Matrix ccmn_weight_global(const Matrix& stacked_jacobian, const StackedCovariance& r, int j);
// All M^j at once, sharing one inverse of R.
std::vector<Matrix> ccmn_weights_global(const Matrix& stacked_jacobian, const StackedCovariance& r);

// (T^i^dagger)^T M^j (T^i)^T.
Matrix ccmn_weight_local(const InternodalTransform& ti, const Matrix& stacked_jacobian, const StackedCovariance& r,
                         int j);
Matrix localize_weight(const InternodalTransform& ti, const Matrix& global_weight);

struct GlobalContribution {
  Matrix transform;  // T^j
  InfoContribution contribution;
};

// Information-form fusion in the global space; weights are keyed by position
// in `contributions` and entries without a weight are skipped. Throws NumericalError if the fused information
// matrix is not positive definite.
GaussianBelief fuse_global(const GaussianBelief& prior, const std::vector<GlobalContribution>& contributions,
                           const FusionWeightSet& weights);

// Fusion at node i over its graph neighborhood. Contributions are indexed by
// node; entries outside the neighborhood are never read.
GaussianBelief fuse_local(int node, const GaussianBelief& prior, const CommunicationGraph& graph,
                          const std::vector<InfoContribution>& contributions, const FusionWeightSet& weights);

// Information added at node i, before adding the prior: the pair
// (sum M T^T I T, sum M T^T i) over the neighborhood.
InfoContribution fused_increment(int node, const CommunicationGraph& graph,
                                 const std::vector<InfoContribution>& contributions, const FusionWeightSet& weights);

// Stacked Jacobian of all sensors, each linearized at states[j].
Matrix stacked_jacobian(const std::vector<SensorModel>& sensors, const std::vector<Vector>& states);

// Information-form update of the global prior with all measurements stacked.
GaussianBelief centralized_update(const GaussianBelief& prior, const std::vector<Vector>& measurements,
                                  const std::vector<SensorModel>& sensors, const StackedCovariance& r);

// Inputs for one-step identity checks. r_true drives the centralized
// reference; r_model is what the nodes use for their local R^j and weights.
struct AssimilationSnapshot {
  GaussianBelief global_prior;
  std::vector<SensorModel> sensors;
  std::vector<InternodalTransform> transforms;
  StackedCovariance r_true;
  StackedCovariance r_model;
  std::vector<Vector> measurements;
};

// Relative Frobenius residuals ||lhs - rhs|| / ||rhs||.
struct AssimilationResiduals {
  double global_covariance = 0.0;
  double global_state = 0.0;
  std::vector<double> local_covariance;
  std::vector<double> local_state;
  std::vector<double> local_consistency;

  double max() const;
};

AssimilationResiduals verify_assimilation(const AssimilationSnapshot& snapshot);

// Node prior consistent with a global belief in information form:
// Y^i = (T^i^dagger)^T Y T^i^dagger and y^i = (T^i^dagger)^T y.
GaussianBelief consistent_local_prior(const GaussianBelief& global, const InternodalTransform& t);

}  // namespace infofuse

#endif  // INFOFUSE_FILTERS_HPP_
