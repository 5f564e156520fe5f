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

#include "infofuse/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "infofuse/methods.hpp"
#include "infofuse/noise.hpp"
#include "infofuse/parallel.hpp"

namespace infofuse {

void validate(const TrainingConfig& c, int train_size) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("training config: " + msg); };
  if (!(c.learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (c.batch_size < 1) fail("batch_size must be >= 1");
  if (c.batch_size > train_size) fail(fmt::format("batch_size {} exceeds the {} training trajectories", c.batch_size, train_size));
  if (c.gamma < 0.0 || c.decoupled_decay < 0.0) fail("weight decay must be >= 0");
  if (c.epochs < 0) fail("epochs must be >= 0");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0 && c.beta2 >= 0.0 && c.beta2 < 1.0)) fail("betas must be in [0, 1)");
  if (!(c.epsilon > 0.0)) fail("epsilon must be > 0");
  if (c.hidden_factor < 1) fail("hidden_factor must be >= 1");
  if (c.threads < 1) fail("threads must be >= 1");
  if (c.schedule.kind == LrSchedule::Kind::kCyclic &&
      !(c.schedule.lr_min > 0.0 && c.schedule.lr_max >= c.schedule.lr_min && c.schedule.period >= 2)) {
    fail("cyclic schedule needs 0 < lr_min <= lr_max and period >= 2");
  }
}

double learning_rate_at(const TrainingConfig& c, long step) {
  if (c.schedule.kind == LrSchedule::Kind::kFixed) return c.learning_rate;
  const double pos = static_cast<double>(step % c.schedule.period) / c.schedule.period;
  return c.schedule.lr_min + (c.schedule.lr_max - c.schedule.lr_min) * (1.0 - std::abs(2.0 * pos - 1.0));
}

void adam_step(AdamState& s, Vector& params, const Vector& grad, double lr, const TrainingConfig& c) {
  if (s.m.size() != params.size()) {
    s.m = Vector::Zero(params.size());
    s.v = Vector::Zero(params.size());
  }
  ++s.step;
  s.m = c.beta1 * s.m + (1.0 - c.beta1) * grad;
  s.v = c.beta2 * s.v + (1.0 - c.beta2) * grad.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.step));
  const Vector update = (s.m / bc1).array() / ((s.v / bc2).array().sqrt() + c.epsilon);
  params -= lr * (update + c.decoupled_decay * params);
}

NetworkSpec difnet_network(const Scenario& scenario) {
  return network_spec(local_models(scenario, method_spec(scenario, Method::kDifnet)), scenario.initial_belief);
}

std::vector<Vector> input_scales(const Scenario& scenario, const std::vector<Trajectory>& trajectories) {
  const int n = static_cast<int>(scenario.num_sensors());
  const int m = kStateDim;
  MethodRunner runner(scenario, Method::kDifInexact);
  DecentralizedFilter& filter = *runner.decentralized();
  std::vector<Vector> sum_sq(static_cast<std::size_t>(n), Vector::Zero((m + m * m) * n));
  long count = 0;
  for (const auto& traj : trajectories) {
    filter.reset(scenario.initial_belief);
    try {
      for (int k = 1; k <= traj.steps(); ++k) {
        filter.step(k, traj.measurements_at(k));
        std::vector<InfoContribution> c;
        for (const auto& s : filter.last_local()) c.push_back(s.contribution);
        for (int i = 0; i < n; ++i) sum_sq[i] += encode_inputs(c, filter.graph(), i, m).cwiseAbs2();
        ++count;
      }
    } catch (const NumericalError&) {
      continue;
    }
  }
  std::vector<Vector> out;
  for (const auto& s : sum_sq) {
    Vector scale = Vector::Ones(s.size());
    if (count > 0) {
      for (Eigen::Index r = 0; r < s.size(); ++r) {
        const double rms = std::sqrt(s(r) / static_cast<double>(count));
        if (rms > 1e-12) scale(r) = 1.0 / rms;
      }
    }
    out.push_back(std::move(scale));
  }
  return out;
}

std::vector<double> mean_loss(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                              const std::vector<Trajectory>& trajectories, int threads) {
  const std::size_t n = models.size();
  std::vector<std::vector<double>> per(trajectories.size());
  parallel_for(static_cast<int>(trajectories.size()), threads, [&](int l) {
    try {
      per[static_cast<std::size_t>(l)] = trajectory_loss(spec, models, trajectories[static_cast<std::size_t>(l)]);
    } catch (const NumericalError&) {
      per[static_cast<std::size_t>(l)].assign(n, std::numeric_limits<double>::infinity());
    }
  });
  std::vector<double> out(n, 0.0);
  for (const auto& p : per) {
    for (std::size_t i = 0; i < n; ++i) out[i] += p[i];
  }
  for (double& v : out) v /= std::max<std::size_t>(1, trajectories.size());
  return out;
}

namespace {

double penalty(const DifnetModel& m, double gamma) { return gamma * m.params().squaredNorm(); }

void record_epoch(TrainingState& st, int epoch, const std::vector<double>& train_loss, const std::vector<double>& cv,
                  double gamma) {
  double cv_sum = 0.0;
  for (std::size_t i = 0; i < st.models.size(); ++i) {
    st.history.push_back({epoch, static_cast<int>(i) + 1, train_loss[i], cv[i], penalty(st.models[i], gamma)});
    cv_sum += cv[i];
  }
  if (epoch == 0 || cv_sum < st.best_cv) {
    st.best_cv = cv_sum;
    st.best_epoch = epoch;
    st.best_models = st.models;
  }
}

}  // namespace

std::vector<int> epoch_order(std::uint64_t seed, int epoch, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, 0x5348554646000000ULL + static_cast<std::uint64_t>(epoch));
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  return order;
}

TrainingState initial_training_state(const Scenario& scenario, const Dataset& dataset, const TrainingConfig& config) {
  validate(config, static_cast<int>(dataset.train.size()));
  const int n = static_cast<int>(scenario.num_sensors());
  const DifnetShape shape = DifnetShape::with_factor(kStateDim, n, config.hidden_factor);
  const int n_scale = std::min<int>(config.scale_trajectories, static_cast<int>(dataset.train.size()));
  const auto scales =
      input_scales(scenario, std::vector<Trajectory>(dataset.train.begin(), dataset.train.begin() + n_scale));
  TrainingState st;
  for (int i = 0; i < n; ++i) {
    DifnetModel m = DifnetModel::initialized(shape, config.seed, config.identity_anchor);
    m.input_scale() = scales[static_cast<std::size_t>(i)];
    st.models.push_back(std::move(m));
  }
  st.optimizers.resize(static_cast<std::size_t>(n));
  const NetworkSpec spec = difnet_network(scenario);
  record_epoch(st, 0, mean_loss(spec, st.models, dataset.train, config.threads),
               mean_loss(spec, st.models, dataset.cv, config.threads), config.gamma);
  return st;
}

void train(TrainingState& st, const Scenario& scenario, const Dataset& dataset, const TrainingConfig& config,
           const EpochCallback& on_epoch) {
  const int n_train = static_cast<int>(dataset.train.size());
  validate(config, n_train);
  const NetworkSpec spec = difnet_network(scenario);
  const std::size_t n = st.models.size();
  if (st.optimizers.size() != n) st.optimizers.resize(n);

  for (int epoch = st.epoch + 1; epoch <= config.epochs; ++epoch) {
    const std::vector<int> order = epoch_order(config.seed, epoch, n_train);
    std::vector<double> train_sum(n, 0.0);
    int train_count = 0;
    for (int start = 0; start < n_train; start += config.batch_size) {
      const int count = std::min(config.batch_size, n_train - start);
      std::vector<TrajectoryGradient> results(static_cast<std::size_t>(count));
      std::vector<char> ok(static_cast<std::size_t>(count), 1);
      parallel_for(count, config.threads, [&](int b) {
        const Trajectory& traj = dataset.train[static_cast<std::size_t>(order[static_cast<std::size_t>(start + b)])];
        try {
          results[static_cast<std::size_t>(b)] = trajectory_gradient(spec, st.models, traj, config.gradient_mode);
        } catch (const NumericalError&) {
          ok[static_cast<std::size_t>(b)] = 0;
        }
      });
      int used = 0;
      std::vector<Vector> grads(n);
      for (std::size_t i = 0; i < n; ++i) grads[i] = Vector::Zero(st.models[i].params().size());
      for (int b = 0; b < count; ++b) {
        if (!ok[static_cast<std::size_t>(b)]) {
          ++st.skipped_trajectories;
          continue;
        }
        const TrajectoryGradient& r = results[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < n; ++i) {
          if (!std::isfinite(r.loss[i]) || !r.grads[i].allFinite()) {
            throw TrainingError(fmt::format("non-finite loss or gradient at epoch {}, node {}, trajectory {}", epoch,
                                            i + 1, order[static_cast<std::size_t>(start + b)]));
          }
          grads[i] += r.grads[i];
          train_sum[i] += r.loss[i];
        }
        ++used;
      }
      train_count += used;
      if (used == 0) {
        throw TrainingError(fmt::format("every trajectory of a batch failed numerically at epoch {}", epoch));
      }
      for (std::size_t i = 0; i < n; ++i) {
        Vector g = grads[i] / used + 2.0 * config.gamma * st.models[i].params();
        const double lr = learning_rate_at(config, st.optimizers[i].step);
        adam_step(st.optimizers[i], st.models[i].params(), g, lr, config);
      }
    }
    std::vector<double> train_loss(n);
    for (std::size_t i = 0; i < n; ++i) train_loss[i] = train_sum[i] / std::max(1, train_count);
    const std::vector<double> cv = mean_loss(spec, st.models, dataset.cv, config.threads);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(cv[i])) throw TrainingError(fmt::format("cv loss is NaN at epoch {}, node {}", epoch, i + 1));
    }
    st.epoch = epoch;
    record_epoch(st, epoch, train_loss, cv, config.gamma);
    if (on_epoch) on_epoch(st);
  }
}

}  // namespace infofuse
