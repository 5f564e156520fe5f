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

// The compared estimators and what each is allowed to know.
//
//   method             motion q   node noise     weights
//   centralized-exact  exact      R~ (stacked)   -
//   dif-exact          exact      R~^jj          CCMN from R~
//   dif-inexact        q'         R'^j           CCMN from R'
//   cumn               exact      R~^jj          identity
//   difnet             q'         R'^j           learned

#ifndef INFOFUSE_METHODS_HPP_
#define INFOFUSE_METHODS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/decentralized.hpp"
#include "infofuse/network.hpp"
#include "infofuse/scenario.hpp"

namespace infofuse {

enum class Method { kCentralizedExact, kDifExact, kDifInexact, kCumn, kDifnet };

std::string_view to_string(Method method);
// Throws std::invalid_argument listing the valid names.
Method method_from_string(std::string_view name);
std::vector<Method> all_methods();
// Comma-separated names; "all" expands to every method.
std::vector<Method> parse_method_list(std::string_view list);

struct MethodSpec {
  Method method = Method::kDifExact;
  MotionModel motion;
  StackedCovariance node_noise;  // only the diagonal blocks reach the nodes
  WeightSource weights = WeightSource::kModelCcmn;
  StackedCovariance weight_noise;  // CCMN methods; stacked R for centralized-exact
};

MethodSpec method_spec(const Scenario& scenario, Method method);

std::vector<LocalModel> local_models(const Scenario& scenario, const MethodSpec& spec);

// Local-coordinate estimates of one trajectory, node j in rows of means[j].
struct TrajectoryEstimates {
  std::vector<Matrix> means;  // per node, steps x m_j
  bool diverged = false;
  std::string failure;        // set when diverged
};

// Runs one method over trajectories. Not thread-safe; use one per worker.
class MethodRunner {
 public:
  // `models` is required for difnet and ignored otherwise.
  MethodRunner(const Scenario& scenario, Method method, const std::vector<DifnetModel>* models = nullptr);

  TrajectoryEstimates run(const Trajectory& trajectory);

  Method method() const { return spec_.method; }
  const MethodSpec& spec() const { return spec_; }
  // Decentralized methods only.
  DecentralizedFilter* decentralized() { return filter_.get(); }

 private:
  Scenario scenario_;
  MethodSpec spec_;
  std::unique_ptr<WeightProvider> weights_;
  std::unique_ptr<DecentralizedFilter> filter_;
  std::unique_ptr<CentralizedFilter> central_;
};

// Non-finite entries or a covariance with eigenvalues below -1e-9 trace.
bool belief_ok(const GaussianBelief& belief);

}  // namespace infofuse

#endif  // INFOFUSE_METHODS_HPP_
