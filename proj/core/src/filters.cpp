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

#include "infofuse/filters.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace infofuse {

Vector LocalModel::transition(const Vector& local) const {
  return transform.matrix() * propagate(motion, lift(local));
}

Matrix LocalModel::transition_jacobian(const Vector& local) const {
  return localize_motion(transform, transform, motion_jacobian(motion, lift(local)));
}

Matrix LocalModel::process_noise() const {
  return symmetrize(transform.matrix() * process_noise_cov(motion) * transform.matrix().transpose());
}

Vector LocalModel::predicted_measurement(const Vector& local) const { return measure(sensor, lift(local)); }

Matrix LocalModel::measurement_jacobian(const Vector& local) const {
  return localize_measurement_jacobian(transform, infofuse::measurement_jacobian(sensor, lift(local)));
}

std::string_view to_string(WeightSource source) {
  switch (source) {
    case WeightSource::kModelCcmn:
      return "model-ccmn";
    case WeightSource::kModelCumn:
      return "model-cumn";
    case WeightSource::kLearned:
      return "learned";
  }
  return "unknown";
}

GaussianBelief ekf_predict(const GaussianBelief& post_prev, const LocalModel& model) {
  if (post_prev.dim() != model.transform.local_dim()) {
    throw std::invalid_argument("ekf_predict: belief dimension does not match the local model");
  }
  const Matrix f = model.transition_jacobian(post_prev.mean);
  return {model.transition(post_prev.mean), symmetrize(f * post_prev.cov * f.transpose() + model.process_noise())};
}

GaussianBelief ekf_predict(const GaussianBelief& post_prev, const Matrix& transition, const Matrix& process_noise) {
  return {transition * post_prev.mean,
          symmetrize(transition * post_prev.cov * transition.transpose() + process_noise)};
}

LocalFilterState ekf_update_with_innovation(const GaussianBelief& prior, const Vector& innovation,
                                            const Matrix& jacobian, const Matrix& noise_cov) {
  if (jacobian.cols() != prior.dim() || jacobian.rows() != innovation.size() ||
      noise_cov.rows() != innovation.size()) {
    throw std::invalid_argument("ekf_update: dimension mismatch");
  }
  LocalFilterState st;
  st.prior = prior;
  st.measurement_jacobian = jacobian;
  const Matrix pct = prior.cov * jacobian.transpose();
  st.innovation_cov = symmetrize(jacobian * pct + noise_cov);
  Eigen::LLT<Matrix> llt(st.innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("ekf_update: innovation covariance is not positive definite (ill-conditioned geometry)");
  }
  st.gain = llt.solve(pct.transpose()).transpose();
  st.posterior.mean = prior.mean + st.gain * innovation;
  st.posterior.cov = symmetrize(prior.cov - st.gain * st.innovation_cov * st.gain.transpose());
  return st;
}

LocalFilterState ekf_update(const GaussianBelief& prior, const Vector& measurement, const Matrix& jacobian,
                            const Matrix& noise_cov) {
  LocalFilterState st =
      ekf_update_with_innovation(prior, measurement - jacobian * prior.mean, jacobian, noise_cov);
  st.predicted_measurement = jacobian * prior.mean;
  return st;
}

LocalFilterState ekf_update(const GaussianBelief& prior, const Vector& measurement, const LocalModel& model) {
  if (measurement.size() != model.sensor.measurement_dim()) {
    throw std::invalid_argument(fmt::format("ekf_update: sensor {} expects {} measurements, got {}",
                                            model.sensor.id, model.sensor.measurement_dim(), measurement.size()));
  }
  const Vector zhat = model.predicted_measurement(prior.mean);
  LocalFilterState st = ekf_update_with_innovation(prior, innovation(model.sensor, measurement, zhat),
                                                   model.measurement_jacobian(prior.mean), model.sensor.noise_cov);
  st.sensor_id = model.sensor.id;
  st.predicted_measurement = zhat;
  return st;
}

InfoContribution info_contribution(const LocalFilterState& state) {
  const Matrix post_inv = spd_inverse(state.posterior.cov);
  const Matrix prior_inv = spd_inverse(state.prior.cov);
  return {post_inv * state.posterior.mean - prior_inv * state.prior.mean, symmetrize(post_inv - prior_inv)};
}

Matrix sensor_rows(const Matrix& stacked_jacobian, const StackedCovariance& r, int j) {
  if (stacked_jacobian.rows() != r.total_dim()) {
    throw std::invalid_argument("stacked Jacobian rows do not match the stacked covariance");
  }
  return stacked_jacobian.middleRows(r.offset(j), r.dims().at(j));
}

namespace {

Matrix ccmn_weight_with_inverse(const Matrix& h, const StackedCovariance& r, const Matrix& r_inv, int j) {
  const Matrix hj = sensor_rows(h, r, j);
  if (!has_full_row_rank(hj)) {
    throw std::invalid_argument(fmt::format("fusion weight: Jacobian block of sensor {} is rank deficient", j + 1));
  }
  const Matrix r_inv_col = r_inv.middleCols(r.offset(j), r.dims()[j]);
  return h.transpose() * r_inv_col * r.diagonal_block(j) * pseudo_inverse(hj).transpose();
}

}  // namespace

Matrix ccmn_weight_global(const Matrix& stacked_jacobian, const StackedCovariance& r, int j) {
  return ccmn_weight_with_inverse(stacked_jacobian, r, spd_inverse(r.full()), j);
}

std::vector<Matrix> ccmn_weights_global(const Matrix& stacked_jacobian, const StackedCovariance& r) {
  const Matrix r_inv = spd_inverse(r.full());
  std::vector<Matrix> out;
  out.reserve(r.num_sensors());
  for (std::size_t j = 0; j < r.num_sensors(); ++j) {
    out.push_back(ccmn_weight_with_inverse(stacked_jacobian, r, r_inv, static_cast<int>(j)));
  }
  return out;
}

Matrix localize_weight(const InternodalTransform& ti, const Matrix& global_weight) {
  return ti.pinv().transpose() * global_weight * ti.matrix().transpose();
}

Matrix ccmn_weight_local(const InternodalTransform& ti, const Matrix& stacked_jacobian, const StackedCovariance& r,
                         int j) {
  return localize_weight(ti, ccmn_weight_global(stacked_jacobian, r, j));
}

namespace {

GaussianBelief information_to_moment(const Matrix& info, const Vector& info_vec) {
  const Matrix y = symmetrize(info);
  const Matrix cov = spd_inverse(y);
  return {cov * info_vec, cov};
}

}  // namespace

GaussianBelief fuse_global(const GaussianBelief& prior, const std::vector<GlobalContribution>& contributions,
                           const FusionWeightSet& weights) {
  const Matrix prior_info = spd_inverse(prior.cov);
  Matrix info = prior_info;
  Vector info_vec = prior_info * prior.mean;
  for (std::size_t j = 0; j < contributions.size(); ++j) {
    const auto it = weights.weights.find(static_cast<int>(j));
    if (it == weights.weights.end()) continue;
    const Matrix& t = contributions[j].transform;
    const InfoContribution& c = contributions[j].contribution;
    info += it->second * t.transpose() * c.I_mat * t;
    info_vec += it->second * t.transpose() * c.i_vec;
  }
  return information_to_moment(info, info_vec);
}

InfoContribution fused_increment(int node, const CommunicationGraph& graph,
                                 const std::vector<InfoContribution>& contributions, const FusionWeightSet& weights) {
  const Eigen::Index mi = graph.node_transform(node).local_dim();
  InfoContribution acc{Vector::Zero(mi), Matrix::Zero(mi, mi)};
  for (int j : graph.neighborhood(node)) {
    const auto it = weights.weights.find(j);
    if (it == weights.weights.end()) continue;
    const Matrix& tij = graph.transform(node, j);
    const InfoContribution& c = contributions.at(j);
    acc.I_mat += it->second * tij.transpose() * c.I_mat * tij;
    acc.i_vec += it->second * tij.transpose() * c.i_vec;
  }
  return acc;
}

GaussianBelief fuse_local(int node, const GaussianBelief& prior, const CommunicationGraph& graph,
                          const std::vector<InfoContribution>& contributions, const FusionWeightSet& weights) {
  const Matrix prior_info = spd_inverse(prior.cov);
  const InfoContribution inc = fused_increment(node, graph, contributions, weights);
  return information_to_moment(prior_info + inc.I_mat, prior_info * prior.mean + inc.i_vec);
}

Matrix stacked_jacobian(const std::vector<SensorModel>& sensors, const std::vector<Vector>& states) {
  if (states.size() != sensors.size()) throw std::invalid_argument("stacked_jacobian: one state per sensor");
  int rows = 0;
  for (const auto& s : sensors) rows += s.measurement_dim();
  Matrix h(rows, kStateDim);
  int off = 0;
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    const int n = sensors[j].measurement_dim();
    h.middleRows(off, n) = measurement_jacobian(sensors[j], states[j]);
    off += n;
  }
  return h;
}

GaussianBelief centralized_update(const GaussianBelief& prior, const std::vector<Vector>& measurements,
                                  const std::vector<SensorModel>& sensors, const StackedCovariance& r) {
  if (measurements.size() != sensors.size() || r.num_sensors() != sensors.size()) {
    throw std::invalid_argument("centralized_update: sensors, measurements and covariance disagree");
  }
  const Matrix h = stacked_jacobian(sensors, std::vector<Vector>(sensors.size(), prior.mean));
  Vector z_tilde(r.total_dim());
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    const Vector zhat = measure(sensors[j], prior.mean);
    z_tilde.segment(r.offset(static_cast<int>(j)), r.dims()[j]) = innovation(sensors[j], measurements[j], zhat);
  }
  z_tilde += h * prior.mean;
  const Matrix prior_info = spd_inverse(prior.cov);
  const Matrix ht_rinv = h.transpose() * spd_inverse(r.full());
  return information_to_moment(prior_info + ht_rinv * h, prior_info * prior.mean + ht_rinv * z_tilde);
}

GaussianBelief consistent_local_prior(const GaussianBelief& global, const InternodalTransform& t) {
  const Matrix y = spd_inverse(global.cov);
  const Matrix& tp = t.pinv();
  return information_to_moment(tp.transpose() * y * tp, tp.transpose() * y * global.mean);
}

double AssimilationResiduals::max() const {
  double m = std::max(global_covariance, global_state);
  for (const auto* v : {&local_covariance, &local_state, &local_consistency}) {
    for (double x : *v) m = std::max(m, x);
  }
  return m;
}

AssimilationResiduals verify_assimilation(const AssimilationSnapshot& snap) {
  const std::size_t n = snap.sensors.size();
  const GaussianBelief& prior = snap.global_prior;
  const Matrix prior_info = spd_inverse(prior.cov);

  // Centralized reference increments H^T R^-1 H and H^T R^-1 z~.
  const Matrix h = stacked_jacobian(snap.sensors, std::vector<Vector>(n, prior.mean));
  Vector z_tilde(snap.r_true.total_dim());
  for (std::size_t j = 0; j < n; ++j) {
    z_tilde.segment(snap.r_true.offset(static_cast<int>(j)), snap.r_true.dims()[j]) =
        innovation(snap.sensors[j], snap.measurements[j], measure(snap.sensors[j], prior.mean));
  }
  z_tilde += h * prior.mean;
  const Matrix ht_rinv = h.transpose() * spd_inverse(snap.r_true.full());
  const Matrix central_info = ht_rinv * h;
  const Vector central_vec = ht_rinv * z_tilde;

  // Node-level EKF updates from consistent priors.
  std::vector<InfoContribution> contributions;
  std::vector<GaussianBelief> node_priors;
  for (std::size_t j = 0; j < n; ++j) {
    LocalModel model{MotionModel{}, snap.sensors[j], snap.transforms[j]};
    model.sensor.noise_cov = snap.r_model.diagonal_block(static_cast<int>(j));
    node_priors.push_back(consistent_local_prior(prior, snap.transforms[j]));
    contributions.push_back(info_contribution(ekf_update(node_priors.back(), snap.measurements[j], model)));
  }

  std::vector<Vector> points;
  for (std::size_t j = 0; j < n; ++j) points.push_back(snap.transforms[j].pinv() * node_priors[j].mean);
  const std::vector<Matrix> weights = ccmn_weights_global(stacked_jacobian(snap.sensors, points), snap.r_model);

  AssimilationResiduals res;
  Matrix fused_info = Matrix::Zero(kStateDim, kStateDim);
  Vector fused_vec = Vector::Zero(kStateDim);
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix& t = snap.transforms[j].matrix();
    fused_info += weights[j] * t.transpose() * contributions[j].I_mat * t;
    fused_vec += weights[j] * t.transpose() * contributions[j].i_vec;
  }
  res.global_covariance = relative_frobenius(symmetrize(fused_info), central_info);
  res.global_state = relative_frobenius(fused_vec, central_vec);

  const CommunicationGraph graph = build_graph(snap.transforms);
  const Matrix global_post_info = prior_info + symmetrize(fused_info);
  for (std::size_t i = 0; i < n; ++i) {
    const InternodalTransform& ti = snap.transforms[i];
    FusionWeightSet local;
    for (int j : graph.neighborhood(static_cast<int>(i))) local.weights[j] = localize_weight(ti, weights[j]);
    const InfoContribution inc = fused_increment(static_cast<int>(i), graph, contributions, local);
    const Matrix& tp = ti.pinv();
    res.local_covariance.push_back(relative_frobenius(symmetrize(inc.I_mat), tp.transpose() * central_info * tp));
    res.local_state.push_back(relative_frobenius(inc.i_vec, tp.transpose() * central_vec));
    const Matrix node_post_info = spd_inverse(node_priors[i].cov) + symmetrize(inc.I_mat);
    res.local_consistency.push_back(relative_frobenius(node_post_info, tp.transpose() * global_post_info * tp));
  }
  return res;
}

}  // namespace infofuse
