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

// Training of the per-node weight networks: Adam over full-trajectory
// gradients, best-cv model selection, resumable state.

#ifndef INFOFUSE_TRAINING_HPP_
#define INFOFUSE_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/network.hpp"
#include "infofuse/scenario.hpp"
#include "infofuse/unrolled.hpp"

namespace infofuse {

struct LrSchedule {
  enum class Kind { kFixed, kCyclic };
  Kind kind = Kind::kFixed;
  double lr_min = 1e-4;
  double lr_max = 1e-3;
  int period = 100;  // optimizer steps per triangle
};

struct TrainingConfig {
  double learning_rate = 1e-3;
  int batch_size = 20;
  double gamma = 1e-4;           // L2 penalty inside the loss
  double decoupled_decay = 0.0;  // optional AdamW-style decay on top
  int epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  LrSchedule schedule;
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::kLocal;
  int threads = 1;
  int hidden_factor = 2;        // hidden widths = factor * m^2
  bool identity_anchor = true;  // see DifnetModel::initialized
  int scale_trajectories = 20;  // training trajectories used for input scaling
};

// Throws std::invalid_argument.
void validate(const TrainingConfig& config, int train_size);

double learning_rate_at(const TrainingConfig& config, long step);

struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
};

// One Adam update with bias correction; `lr` overrides config.learning_rate.
void adam_step(AdamState& state, Vector& params, const Vector& grad, double lr, const TrainingConfig& config);

struct LossRecord {
  int epoch = 0;
  int node = 0;  // 1-based
  double train_loss = 0.0;  // mean trajectory loss, data term only
  double cv_loss = 0.0;
  double penalty = 0.0;     // gamma |Theta|^2
};

struct TrainingState {
  std::vector<DifnetModel> models;
  std::vector<AdamState> optimizers;
  int epoch = 0;  // completed epochs
  std::vector<DifnetModel> best_models;
  int best_epoch = 0;
  double best_cv = 0.0;  // summed over nodes
  std::vector<LossRecord> history;
  int skipped_trajectories = 0;  // numerically failed during training
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The network the difnet method runs on: inexact local models.
NetworkSpec difnet_network(const Scenario& scenario);

// Per-feature 1/RMS of the encoded inputs seen by each node when fusing with
// the model-based weights of the inexact method.
std::vector<Vector> input_scales(const Scenario& scenario, const std::vector<Trajectory>& trajectories);

// Fresh models (same seed for every node), scales and epoch-0 losses.
TrainingState initial_training_state(const Scenario& scenario, const Dataset& dataset, const TrainingConfig& config);

// Mean per-node data loss over trajectories; trajectories whose filter
// fails numerically count as +inf.
std::vector<double> mean_loss(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                              const std::vector<Trajectory>& trajectories, int threads);

using EpochCallback = std::function<void(const TrainingState&)>;

// Runs epochs state.epoch+1 .. config.epochs. Throws TrainingError on a
// non-finite loss or gradient.
void train(TrainingState& state, const Scenario& scenario, const Dataset& dataset, const TrainingConfig& config,
           const EpochCallback& on_epoch = {});

// Order of training trajectories in a given epoch.
std::vector<int> epoch_order(std::uint64_t seed, int epoch, int n);

}  // namespace infofuse

#endif  // INFOFUSE_TRAINING_HPP_
