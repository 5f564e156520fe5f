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

#include "infofuse/dataset.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include "json.hpp"

#include "infofuse/hashing.hpp"
#include "infofuse/parallel.hpp"

namespace infofuse {

namespace fs = std::filesystem;

std::vector<Vector> Trajectory::measurements_at(int k) const {
  std::vector<Vector> out;
  out.reserve(measurements.size());
  for (const auto& m : measurements) out.push_back(m.row(k - 1).transpose());
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kCv:
      return "cv";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

const std::vector<Trajectory>& Dataset::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kCv:
      return cv;
    case Split::kTest:
      return test;
  }
  throw std::invalid_argument("unknown split");
}

namespace {

std::uint64_t trajectory_seed(std::uint64_t seed, int index) {
  // Decorrelate (seed, index) pairs before they enter seed_seq.
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index);
}

void draw_measurements(const Scenario& scenario, Trajectory& traj, std::uint64_t seed, int index) {
  Rng rng = make_rng(trajectory_seed(seed, index), kMeasurementStream);
  const StackedCovariance nominal = nominal_noise(scenario);
  const Matrix nominal_factor = cholesky_lower(nominal.full());
  traj.measurements.clear();
  for (const auto& s : scenario.sensors) traj.measurements.emplace_back(traj.steps(), s.measurement_dim());
  for (int k = 1; k <= traj.steps(); ++k) {
    const Vector u = standard_normal(nominal.total_dim(), rng);
    Vector w = nominal_factor * u;
    if (scenario.time_variation.enabled()) {
      w = cholesky_lower(true_noise(scenario, k).full()) * u;
    }
    const Vector x = traj.state(k);
    for (std::size_t j = 0; j < scenario.sensors.size(); ++j) {
      Vector z = measure(scenario.sensors[j], x) + w.segment(nominal.offset(static_cast<int>(j)), nominal.dims()[j]);
      const auto angular = angular_rows(scenario.sensors[j]);
      for (std::size_t r = 0; r < angular.size(); ++r) {
        if (angular[r]) z(static_cast<Eigen::Index>(r)) = wrap_angle(z(static_cast<Eigen::Index>(r)));
      }
      traj.measurements[j].row(k - 1) = z.transpose();
    }
  }
}

}  // namespace

Trajectory simulate_trajectory(const Scenario& scenario, std::uint64_t seed, int index) {
  Rng rng = make_rng(trajectory_seed(seed, index), kTruthStream);
  const Matrix q = process_noise_cov(scenario.motion);
  Trajectory traj;
  traj.truth.resize(scenario.steps, kStateDim);
  Vector x = scenario.x0;
  for (int k = 1; k <= scenario.steps; ++k) {
    x = propagate(scenario.motion, x) + sample_gaussian(q, rng);
    traj.truth.row(k - 1) = x.transpose();
  }
  draw_measurements(scenario, traj, seed, index);
  return traj;
}

Trajectory remeasure(const Scenario& scenario, const Trajectory& base, std::uint64_t seed, int index) {
  Trajectory traj;
  traj.truth = base.truth;
  draw_measurements(scenario, traj, seed, index);
  return traj;
}

Dataset generate_dataset(const Scenario& scenario, const SplitSizes& sizes, std::uint64_t seed, int threads) {
  if (sizes.train < 0 || sizes.cv < 0 || sizes.test < 0) throw std::invalid_argument("split sizes must be >= 0");
  validate(scenario);
  std::vector<Trajectory> all(static_cast<std::size_t>(sizes.total()));
  parallel_for(sizes.total(), threads, [&](int i) { all[static_cast<std::size_t>(i)] = simulate_trajectory(scenario, seed, i); });
  Dataset d;
  d.scenario_name = scenario.name;
  d.scenario_fingerprint = scenario_fingerprint(scenario);
  d.seed = seed;
  d.sizes = sizes;
  auto it = all.begin();
  d.train.assign(std::make_move_iterator(it), std::make_move_iterator(it + sizes.train));
  it += sizes.train;
  d.cv.assign(std::make_move_iterator(it), std::make_move_iterator(it + sizes.cv));
  it += sizes.cv;
  d.test.assign(std::make_move_iterator(it), std::make_move_iterator(it + sizes.test));
  return d;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step";
  for (int c = 0; c < kStateDim; ++c) out += fmt::format(",x{}", c);
  for (std::size_t j = 0; j < t.measurements.size(); ++j) {
    for (Eigen::Index r = 0; r < t.measurements[j].cols(); ++r) out += fmt::format(",s{}_z{}", j + 1, r);
  }
  out += '\n';
  for (int k = 1; k <= t.steps(); ++k) {
    out += fmt::format("{}", k);
    for (int c = 0; c < kStateDim; ++c) out += fmt::format(",{:.17g}", t.truth(k - 1, c));
    for (const auto& m : t.measurements) {
      for (Eigen::Index r = 0; r < m.cols(); ++r) out += fmt::format(",{:.17g}", m(k - 1, r));
    }
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text, const Scenario& scenario) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  int width = 1 + kStateDim;
  for (const auto& s : scenario.sensors) width += s.measurement_dim();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(fmt::format("bad number '{}' on data row {}", cell, rows.size() + 1));
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (static_cast<int>(row.size()) != width) {
      throw std::runtime_error(
          fmt::format("data row {} has {} columns, expected {}", rows.size() + 1, row.size(), width));
    }
    rows.push_back(std::move(row));
  }
  Trajectory t;
  const auto steps = static_cast<Eigen::Index>(rows.size());
  t.truth.resize(steps, kStateDim);
  for (const auto& s : scenario.sensors) t.measurements.emplace_back(steps, s.measurement_dim());
  for (Eigen::Index k = 0; k < steps; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    if (row[0] != static_cast<double>(k + 1)) throw std::runtime_error("steps must be 1, 2, ... in order");
    std::size_t c = 1;
    for (int i = 0; i < kStateDim; ++i) t.truth(k, i) = row[c++];
    for (auto& m : t.measurements) {
      for (Eigen::Index r = 0; r < m.cols(); ++r) m(k, r) = row[c++];
    }
  }
  return t;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_name(int i) { return fmt::format("traj_{:04d}.csv", i); }

}  // namespace

std::string save_dataset(const Dataset& d, const Scenario& scenario, const fs::path& dir) {
  Sha256 content;
  for (Split split : {Split::kTrain, Split::kCv, Split::kTest}) {
    const fs::path sub = dir / std::string(to_string(split));
    fs::create_directories(sub);
    const auto& trajs = d.split(split);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      const std::string csv = trajectory_csv(trajs[i]);
      const std::string name = file_name(static_cast<int>(i));
      content.update(fmt::format("{}/{}\n", to_string(split), name));
      content.update(csv);
      write_file(sub / name, csv);
    }
  }
  const std::string hash = content.hex_digest();
  nlohmann::ordered_json m;
  m["format"] = "infofuse-dataset";
  m["version"] = 1;
  m["scenario"] = d.scenario_name;
  m["scenario_fingerprint"] = d.scenario_fingerprint;
  m["seed"] = d.seed;
  m["steps"] = scenario.steps;
  m["splits"] = {{"train", d.sizes.train}, {"cv", d.sizes.cv}, {"test", d.sizes.test}};
  m["content_sha256"] = hash;
  m["created_utc"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                                std::chrono::system_clock::now())));
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  return hash;
}

Dataset load_dataset(const fs::path& dir, const Scenario& scenario) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw std::runtime_error(fmt::format("no dataset at '{}' (missing manifest.json)", dir.string()));
  }
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("'{}': {}", manifest_path.string(), e.what()));
  }
  Dataset d;
  try {
    d.scenario_name = m.at("scenario").get<std::string>();
    d.scenario_fingerprint = m.at("scenario_fingerprint").get<std::string>();
    d.seed = m.at("seed").get<std::uint64_t>();
    d.sizes = {m.at("splits").at("train").get<int>(), m.at("splits").at("cv").get<int>(),
               m.at("splits").at("test").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(fmt::format("'{}': {}", manifest_path.string(), e.what()));
  }
  if (d.scenario_fingerprint != scenario_fingerprint(scenario)) {
    throw std::runtime_error(fmt::format("dataset '{}' was generated for a different scenario ('{}')",
                                         dir.string(), d.scenario_name));
  }
  auto load_split = [&](Split split, int count, std::vector<Trajectory>& out) {
    for (int i = 0; i < count; ++i) {
      const fs::path p = dir / std::string(to_string(split)) / file_name(i);
      try {
        out.push_back(parse_trajectory_csv(read_file(p), scenario));
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(fmt::format("'{}': {}", p.string(), e.what()));
      }
    }
  };
  load_split(Split::kTrain, d.sizes.train, d.train);
  load_split(Split::kCv, d.sizes.cv, d.cv);
  load_split(Split::kTest, d.sizes.test, d.test);
  return d;
}

}  // namespace infofuse
