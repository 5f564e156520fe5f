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

#include "infofuse/methods.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace infofuse {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 5> kMethodNames = {{
    {Method::kCentralizedExact, "centralized-exact"},
    {Method::kDifExact, "dif-exact"},
    {Method::kDifInexact, "dif-inexact"},
    {Method::kCumn, "cumn"},
    {Method::kDifnet, "difnet"},
}};

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  std::string valid;
  for (const auto& [m, n] : kMethodNames) valid += fmt::format("{}{}", valid.empty() ? "" : ", ", n);
  throw std::invalid_argument(fmt::format("unknown method '{}' (available: {})", name, valid));
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (const auto& [m, n] : kMethodNames) out.push_back(m);
  return out;
}

std::vector<Method> parse_method_list(std::string_view list) {
  if (list == "all") return all_methods();
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, end - start);
    if (!item.empty()) {
      const Method m = method_from_string(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty method list");
  return out;
}

MethodSpec method_spec(const Scenario& s, Method method) {
  MethodSpec spec;
  spec.method = method;
  const bool exact = method != Method::kDifInexact && method != Method::kDifnet;
  spec.motion = exact ? s.motion : inexact_motion(s);
  spec.node_noise = exact ? nominal_noise(s) : inexact_noise(s);
  switch (method) {
    case Method::kCentralizedExact:
    case Method::kDifExact:
    case Method::kDifInexact:
      spec.weights = WeightSource::kModelCcmn;
      spec.weight_noise = spec.node_noise;
      break;
    case Method::kCumn:
      spec.weights = WeightSource::kModelCumn;
      break;
    case Method::kDifnet:
      spec.weights = WeightSource::kLearned;
      break;
  }
  return spec;
}

std::vector<LocalModel> local_models(const Scenario& s, const MethodSpec& spec) {
  std::vector<LocalModel> out;
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    LocalModel m;
    m.motion = spec.motion;
    m.sensor = s.sensors[j];
    m.sensor.noise_cov = spec.node_noise.diagonal_block(static_cast<int>(j));
    m.transform = s.transforms[j];
    out.push_back(std::move(m));
  }
  return out;
}

bool belief_ok(const GaussianBelief& b) {
  if (!b.mean.allFinite() || !b.cov.allFinite()) return false;
  const double tr = b.cov.trace();
  return min_eigenvalue(symmetrize(b.cov)) >= -1e-9 * std::abs(tr);
}

MethodRunner::MethodRunner(const Scenario& scenario, Method method, const std::vector<DifnetModel>* models)
    : scenario_(scenario), spec_(method_spec(scenario, method)) {
  if (method == Method::kCentralizedExact) {
    central_ = std::make_unique<CentralizedFilter>(spec_.motion, scenario_.sensors, spec_.weight_noise);
    return;
  }
  switch (spec_.weights) {
    case WeightSource::kModelCcmn:
      weights_ = std::make_unique<CcmnWeights>(scenario_.sensors, scenario_.transforms, spec_.weight_noise);
      break;
    case WeightSource::kModelCumn:
      weights_ = std::make_unique<CumnWeights>();
      break;
    case WeightSource::kLearned:
      if (models == nullptr || models->size() != scenario_.num_sensors()) {
        throw std::invalid_argument("difnet needs one trained model per sensor");
      }
      weights_ = std::make_unique<DifnetWeights>(*models);
      break;
  }
  filter_ = std::make_unique<DecentralizedFilter>(local_models(scenario_, spec_), weights_.get());
}

TrajectoryEstimates MethodRunner::run(const Trajectory& traj) {
  const int n = static_cast<int>(scenario_.num_sensors());
  TrajectoryEstimates est;
  for (int j = 0; j < n; ++j) {
    est.means.push_back(Matrix::Constant(traj.steps(), scenario_.transforms[j].local_dim(),
                                         std::numeric_limits<double>::quiet_NaN()));
  }
  try {
    if (central_) {
      central_->reset(scenario_.initial_belief);
    } else {
      filter_->reset(scenario_.initial_belief);
    }
    for (int k = 1; k <= traj.steps(); ++k) {
      const auto z = traj.measurements_at(k);
      if (central_) {
        central_->step(k, z);
        if (!belief_ok(central_->belief())) throw NumericalError(fmt::format("invalid belief at step {}", k));
        for (int j = 0; j < n; ++j) {
          est.means[j].row(k - 1) = (scenario_.transforms[j].matrix() * central_->belief().mean).transpose();
        }
      } else {
        filter_->step(k, z);
        for (int j = 0; j < n; ++j) {
          const GaussianBelief& b = filter_->posteriors()[static_cast<std::size_t>(j)];
          if (!belief_ok(b)) throw NumericalError(fmt::format("invalid belief at node {} step {}", j + 1, k));
          est.means[j].row(k - 1) = b.mean.transpose();
        }
      }
    }
  } catch (const std::exception& e) {
    est.diverged = true;
    est.failure = e.what();
  }
  return est;
}

}  // namespace infofuse
