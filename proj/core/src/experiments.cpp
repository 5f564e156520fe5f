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

#include "infofuse/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "infofuse/hashing.hpp"
#include "infofuse/parallel.hpp"

namespace infofuse {

StepErrors step_errors(const InternodalTransform& t, const Vector& truth, const Vector& estimate) {
  const Vector e = t.pinv() * (t.matrix() * truth - estimate);
  StepErrors out;
  for (int r : kPositionRows) out.position += e(r) * e(r);
  for (int r : kVelocityRows) out.velocity += e(r) * e(r);
  return out;
}

double summary_mean(const Vector& v) {
  const int last = std::min<int>(kSummaryLastStep, static_cast<int>(v.size()));
  const int first = std::min(kSummaryFirstStep, last);
  if (last < 1) return std::numeric_limits<double>::quiet_NaN();
  return v.segment(first - 1, last - first + 1).mean();
}

double MethodReport::mean_position(int sensor) const { return summary_mean(sensors.at(sensor).rmse_position); }
double MethodReport::mean_velocity(int sensor) const { return summary_mean(sensors.at(sensor).rmse_velocity); }

namespace {

// RMSE over trajectories of per-trajectory squared errors, with a
// delta-method standard error.
void reduce(const std::vector<Vector>& sq, const std::vector<char>& use, Vector& rmse, Vector& se) {
  const Eigen::Index steps = sq.empty() ? 0 : sq.front().size();
  rmse = Vector::Constant(steps, std::numeric_limits<double>::quiet_NaN());
  se = rmse;
  int l = 0;
  for (char u : use) l += u ? 1 : 0;
  if (l == 0) return;
  for (Eigen::Index k = 0; k < steps; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      if (use[i]) sum += sq[i](k);
    }
    const double mean = sum / l;
    double var = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      if (use[i]) var += (sq[i](k) - mean) * (sq[i](k) - mean);
    }
    rmse(k) = std::sqrt(mean);
    const double sd_mean = l > 1 ? std::sqrt(var / (l - 1) / l) : 0.0;
    se(k) = rmse(k) > 0.0 ? sd_mean / (2.0 * rmse(k)) : 0.0;
  }
}

}  // namespace

MethodReport evaluate_method(const Scenario& scenario, Method method, const std::vector<Trajectory>& trajectories,
                             const std::vector<DifnetModel>* models, int threads) {
  const int n = static_cast<int>(scenario.num_sensors());
  const int count = static_cast<int>(trajectories.size());
  std::vector<TrajectoryEstimates> est(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](int l) {
    MethodRunner runner(scenario, method, models);
    est[static_cast<std::size_t>(l)] = runner.run(trajectories[static_cast<std::size_t>(l)]);
  });

  MethodReport report;
  report.method = method;
  std::vector<char> use(static_cast<std::size_t>(count), 1);
  for (int l = 0; l < count; ++l) {
    if (est[static_cast<std::size_t>(l)].diverged) {
      use[static_cast<std::size_t>(l)] = 0;
      report.diverged.push_back(l);
      report.failures.push_back(est[static_cast<std::size_t>(l)].failure);
    }
  }
  for (int j = 0; j < n; ++j) {
    std::vector<Vector> pos(static_cast<std::size_t>(count)), vel(static_cast<std::size_t>(count));
    for (int l = 0; l < count; ++l) {
      const Trajectory& traj = trajectories[static_cast<std::size_t>(l)];
      pos[static_cast<std::size_t>(l)] = Vector::Zero(traj.steps());
      vel[static_cast<std::size_t>(l)] = Vector::Zero(traj.steps());
      if (!use[static_cast<std::size_t>(l)]) continue;
      for (int k = 1; k <= traj.steps(); ++k) {
        const StepErrors e = step_errors(scenario.transforms[j], traj.state(k),
                                         est[static_cast<std::size_t>(l)].means[j].row(k - 1).transpose());
        pos[static_cast<std::size_t>(l)](k - 1) = e.position;
        vel[static_cast<std::size_t>(l)](k - 1) = e.velocity;
      }
    }
    SensorCurves c;
    reduce(pos, use, c.rmse_position, c.stderr_position);
    reduce(vel, use, c.rmse_velocity, c.stderr_velocity);
    report.sensors.push_back(std::move(c));
  }
  return report;
}

std::string rmse_csv(const std::vector<MethodReport>& reports) {
  std::string out = "method,sensor,step,rmse_position,rmse_velocity\n";
  for (const auto& r : reports) {
    for (std::size_t j = 0; j < r.sensors.size(); ++j) {
      const auto& c = r.sensors[j];
      for (Eigen::Index k = 0; k < c.rmse_position.size(); ++k) {
        out += fmt::format("{},{},{},{:.17g},{:.17g}\n", to_string(r.method), j + 1, k + 1, c.rmse_position(k),
                           c.rmse_velocity(k));
      }
    }
  }
  return out;
}

std::string rmse_stderr_csv(const std::vector<MethodReport>& reports) {
  std::string out = "method,sensor,step,stderr_position,stderr_velocity\n";
  for (const auto& r : reports) {
    for (std::size_t j = 0; j < r.sensors.size(); ++j) {
      const auto& c = r.sensors[j];
      for (Eigen::Index k = 0; k < c.stderr_position.size(); ++k) {
        out += fmt::format("{},{},{},{:.17g},{:.17g}\n", to_string(r.method), j + 1, k + 1, c.stderr_position(k),
                           c.stderr_velocity(k));
      }
    }
  }
  return out;
}

std::string summary_csv(const std::vector<MethodReport>& reports) {
  std::string out = "method,sensor,mean_rmse_pos,mean_rmse_vel\n";
  for (const auto& r : reports) {
    for (std::size_t j = 0; j < r.sensors.size(); ++j) {
      out += fmt::format("{},{},{:.17g},{:.17g}\n", to_string(r.method), j + 1,
                         r.mean_position(static_cast<int>(j)), r.mean_velocity(static_cast<int>(j)));
    }
  }
  return out;
}

std::string divergence_csv(const std::vector<MethodReport>& reports) {
  std::string out = "method,trajectory,reason\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.diverged.size(); ++i) {
      std::string reason = r.failures[i];
      std::replace(reason.begin(), reason.end(), ',', ';');
      std::replace(reason.begin(), reason.end(), '\n', ' ');
      out += fmt::format("{},{},{}\n", to_string(r.method), r.diverged[i], reason);
    }
  }
  return out;
}

namespace {

std::string matrix_text(const Matrix& m) {
  std::string s = fmt::format("{}x{}", m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += fmt::format(",{:.17g}", m(r, c));
  }
  return s;
}

std::string short_hash(const std::string& text) { return sha256_hex(text).substr(0, 16); }

}  // namespace

std::string methods_csv(const Scenario& scenario, const std::vector<Method>& methods) {
  std::string out = "method,motion_q,node_noise_sha256,weight_source,weight_noise_sha256\n";
  for (Method m : methods) {
    const MethodSpec spec = method_spec(scenario, m);
    std::string node_noise;
    for (std::size_t j = 0; j < scenario.num_sensors(); ++j) {
      node_noise += matrix_text(spec.node_noise.diagonal_block(static_cast<int>(j))) + ";";
    }
    const std::string weight_source = m == Method::kCentralizedExact ? "stacked" : std::string(to_string(spec.weights));
    std::string weight_noise = "-";
    if (m == Method::kCentralizedExact) {
      weight_noise = short_hash(matrix_text(spec.weight_noise.full()));
      node_noise = matrix_text(spec.weight_noise.full());
    } else if (spec.weights == WeightSource::kModelCcmn) {
      weight_noise = short_hash(matrix_text(spec.weight_noise.full()));
    }
    out += fmt::format("{},{:.17g},{},{},{}\n", to_string(m), spec.motion.q, short_hash(node_noise), weight_source,
                       weight_noise);
  }
  return out;
}

std::string rmse_svg(const std::vector<MethodReport>& reports, int sensor, bool velocity) {
  constexpr double kW = 640, kH = 400, kL = 60, kR = 150, kT = 30, kB = 40;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double ymax = 0.0;
  Eigen::Index steps = 0;
  for (const auto& r : reports) {
    const Vector& v = velocity ? r.sensors.at(sensor).rmse_velocity : r.sensors.at(sensor).rmse_position;
    steps = std::max(steps, v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (std::isfinite(v(k))) ymax = std::max(ymax, v(k));
    }
  }
  if (ymax <= 0.0) ymax = 1.0;
  auto px = [&](double k) { return kL + (kW - kL - kR) * (k - 1) / std::max<double>(1.0, static_cast<double>(steps - 1)); };
  auto py = [&](double y) { return kH - kB - (kH - kT - kB) * y / ymax; };
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">Sensor {3} {4} RMSE</text>\n",
      kW, kH, kL, sensor + 1, velocity ? "velocity" : "position");
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kL, kH - kB, kW - kR);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kL, kT, kH - kB);
  for (int i = 0; i <= 4; ++i) {
    const double y = ymax * i / 4.0;
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
        kL - 4, py(y) + 3, y);
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\">step</text>\n",
                     (kL + kW - kR) / 2, kH - 8);
  for (std::size_t m = 0; m < reports.size(); ++m) {
    const Vector& v = velocity ? reports[m].sensors.at(sensor).rmse_velocity : reports[m].sensors.at(sensor).rmse_position;
    std::string pts;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (std::isfinite(v(k))) pts += fmt::format("{:.1f},{:.1f} ", px(static_cast<double>(k + 1)), py(v(k)));
    }
    const char* color = kColors[m % std::size(kColors)];
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
        kW - kR + 10, kT + 16.0 * static_cast<double>(m + 1), color, to_string(reports[m].method));
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<double> default_sigma_grid() { return {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75}; }

std::vector<SweepRow> sigma_sweep(const Scenario& scenario, const std::vector<double>& sigmas,
                                  const std::vector<Trajectory>& test, std::uint64_t seed, int base_index,
                                  const std::vector<Method>& methods, const std::vector<DifnetModel>* models,
                                  int threads) {
  std::vector<SweepRow> rows;
  for (double sigma : sigmas) {
    if (!(std::abs(sigma) < 1.0)) throw std::invalid_argument(fmt::format("sigma {} is outside (-1, 1)", sigma));
    Scenario s = scenario;
    s.time_variation.sigma = sigma;
    std::vector<Trajectory> redrawn(test.size());
    parallel_for(static_cast<int>(test.size()), threads, [&](int i) {
      redrawn[static_cast<std::size_t>(i)] = remeasure(s, test[static_cast<std::size_t>(i)], seed, base_index + i);
    });
    for (Method m : methods) {
      const MethodReport r = evaluate_method(s, m, redrawn, models, threads);
      for (std::size_t j = 0; j < r.sensors.size(); ++j) {
        rows.push_back({m, sigma, static_cast<int>(j) + 1, r.mean_position(static_cast<int>(j)),
                        r.mean_velocity(static_cast<int>(j)), static_cast<int>(r.diverged.size())});
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "method,sigma,sensor,mean_rmse_pos,mean_rmse_vel,diverged\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{:.17g},{},{:.17g},{:.17g},{}\n", to_string(r.method), r.sigma, r.sensor,
                       r.mean_rmse_position, r.mean_rmse_velocity, r.diverged);
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<BenchResult> bench_fusion_time(const Scenario& scenario, const std::vector<Method>& methods,
                                           const std::vector<Trajectory>& trajectories, int repetitions,
                                           const std::vector<DifnetModel>* models) {
  if (repetitions < 2) throw std::invalid_argument("bench: at least 2 repetitions");
  if (trajectories.empty()) throw std::invalid_argument("bench: no trajectories");
  std::vector<Method> timed;
  for (Method m : methods) {
    if (m == Method::kCentralizedExact) continue;  // no fusion stage
    if (std::find(timed.begin(), timed.end(), m) == timed.end()) timed.push_back(m);
  }
  if (std::find(timed.begin(), timed.end(), Method::kDifExact) == timed.end()) timed.insert(timed.begin(), Method::kDifExact);

  std::vector<std::unique_ptr<MethodRunner>> runners;
  for (Method m : timed) runners.push_back(std::make_unique<MethodRunner>(scenario, m, models));

  using Clock = std::chrono::steady_clock;
  std::vector<std::vector<double>> per_rep(timed.size());
  for (int rep = 0; rep <= repetitions; ++rep) {
    const Trajectory& traj = trajectories[static_cast<std::size_t>(rep) % trajectories.size()];
    for (std::size_t i = 0; i < timed.size(); ++i) {
      DecentralizedFilter& f = *runners[i]->decentralized();
      f.reset(scenario.initial_belief);
      double seconds = 0.0;
      for (int k = 1; k <= traj.steps(); ++k) {
        f.local_stage(k, traj.measurements_at(k));
        const auto t0 = Clock::now();
        f.fusion_stage(k);
        seconds += std::chrono::duration<double>(Clock::now() - t0).count();
      }
      if (rep > 0) per_rep[i].push_back(seconds / traj.steps());  // rep 0 warms up
    }
  }

  auto ratio_over = [&](std::size_t i, std::size_t begin, std::size_t end) {
    std::vector<double> r;
    for (std::size_t k = begin; k < end; ++k) r.push_back(per_rep[i][k] / per_rep[0][k]);
    return median(r);
  };
  const std::size_t reps = per_rep[0].size();
  std::vector<BenchResult> out;
  for (std::size_t i = 0; i < timed.size(); ++i) {
    out.push_back({timed[i], median(per_rep[i]), ratio_over(i, 0, reps), ratio_over(i, 0, reps / 2),
                   ratio_over(i, reps / 2, reps)});
  }
  return out;
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::string out = "method,median_fusion_seconds_per_step,ratio_to_dif_exact,ratio_first_half,ratio_second_half\n";
  for (const auto& r : results) {
    out += fmt::format("{},{:.6e},{:.4f},{:.4f},{:.4f}\n", to_string(r.method), r.median_seconds, r.ratio,
                       r.ratio_first_half, r.ratio_second_half);
  }
  return out;
}

}  // namespace infofuse
