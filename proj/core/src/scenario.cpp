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

#include "infofuse/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include "infofuse/config_keys.hpp"
#include "infofuse/hashing.hpp"

namespace infofuse {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix diag_of_squares(const Vector& std_devs) { return std_devs.array().square().matrix().asDiagonal(); }

Matrix selector_rows(Eigen::Index cols, const std::vector<int>& rows) {
  return InternodalTransform::rows_of_identity(cols, rows).matrix();
}

std::vector<int> range(int begin, int end) {
  std::vector<int> out;
  for (int i = begin; i < end; ++i) out.push_back(i);
  return out;
}

SensorModel linear_sensor(int id, const std::vector<int>& rows, const Vector& std_devs) {
  SensorModel s;
  s.id = id;
  s.kind = MeasurementKind::kLinearSelector;
  s.selector = selector_rows(kStateDim, rows);
  s.noise_cov = diag_of_squares(std_devs);
  return s;
}

SensorModel nonlinear_sensor(int id, MeasurementKind kind, const Eigen::Vector3d& position, const Vector& std_devs) {
  SensorModel s;
  s.id = id;
  s.kind = kind;
  s.position = position;
  s.noise_cov = diag_of_squares(std_devs);
  return s;
}

// Sensors 1-2 see x/y, sensor 3 the full state, sensor 4 z only.
std::vector<InternodalTransform> tracking_transforms() {
  return {InternodalTransform::rows_of_identity(kStateDim, {0, 1, 2, 3}),
          InternodalTransform::rows_of_identity(kStateDim, {0, 1, 2, 3}), InternodalTransform::identity(kStateDim),
          InternodalTransform::rows_of_identity(kStateDim, {4, 5})};
}

}  // namespace

std::vector<std::string> builtin_scenario_names() { return {"linear-cv", "nonlinear-ct", "timevarying"}; }

Scenario linear_cv_scenario() {
  Scenario s;
  s.name = "linear-cv";
  s.motion = MotionModel{MotionKind::kConstantVelocity, 1.0, 1.0, 0.0};
  s.sensors = {linear_sensor(1, {0, 1, 2, 3}, vec({100, 10, 100, 10})),
               linear_sensor(2, {0, 1, 2, 3}, vec({200, 20, 200, 20})),
               linear_sensor(3, range(0, 6), vec({200, 20, 200, 20, 200, 20})),
               linear_sensor(4, {4, 5}, vec({100, 10}))};
  s.transforms = tracking_transforms();
  s.jammer.r0 = diag_of_squares(vec({100, 10, 100, 10, 100, 10}));
  s.jammer.betas.assign(4, 0.5);
  for (const auto& t : s.transforms) s.jammer.selectors.push_back(t.matrix());
  s.x0 = vec({0, 100, 0, 100, 0, 100});
  s.initial_belief = {Vector::Constant(kStateDim, 100.0), 1e4 * Matrix::Identity(kStateDim, kStateDim)};
  s.steps = 50;
  s.inexact = {5.0, {1, 2, 3, 4}};
  return s;
}

Scenario nonlinear_ct_scenario() {
  Scenario s;
  s.name = "nonlinear-ct";
  s.motion = MotionModel{MotionKind::kCoordinatedTurn, 1.0, 1.0, 0.05};
  s.sensors = {
      nonlinear_sensor(1, MeasurementKind::kAzimuthSpeed, {-5500.0, 1000.0, 0.0}, vec({1.0 * kDegToRad, 15})),
      nonlinear_sensor(2, MeasurementKind::kRangeSpeed, {-5000.0, 0.0, 0.0}, vec({250, 25})),
      linear_sensor(3, range(0, 6), vec({200, 20, 200, 20, 200, 20})), linear_sensor(4, {4, 5}, vec({100, 10}))};
  s.sensors[2].position = {500.0, 300.0, 0.0};
  s.sensors[3].position = {50.0, 500.0, 0.0};
  s.transforms = tracking_transforms();
  s.jammer.r0 = diag_of_squares(vec({1.0 * kDegToRad, 150, 15, 100, 10, 100, 10, 100, 10}));
  s.jammer.betas.assign(4, 2.0);
  s.jammer.selectors = {selector_rows(9, {0, 2}), selector_rows(9, {1, 2}), selector_rows(9, range(3, 9)),
                        selector_rows(9, {7, 8})};
  s.x0 = vec({0, 100, 0, 100, 0, 100});
  s.initial_belief = {vec({275, 10, 275, 10, 275, 10}), 1e4 * Matrix::Identity(kStateDim, kStateDim)};
  s.steps = 50;
  s.inexact = {5.0, {1, 2, 3, 4}};
  return s;
}

Scenario timevarying_scenario() {
  Scenario s = linear_cv_scenario();
  s.name = "timevarying";
  s.time_variation = {0.5, 50};
  return s;
}

Scenario builtin_scenario(std::string_view name) {
  if (name == "linear-cv") return linear_cv_scenario();
  if (name == "nonlinear-ct") return nonlinear_ct_scenario();
  if (name == "timevarying") return timevarying_scenario();
  throw std::invalid_argument(
      fmt::format("unknown scenario '{}'; available: {}", name, fmt::join(builtin_scenario_names(), ", ")));
}

void validate(const Scenario& s) {
  validate(s.motion);
  if (s.sensors.empty()) throw std::invalid_argument("scenario: no sensors");
  if (s.transforms.size() != s.sensors.size()) {
    throw std::invalid_argument("scenario: one internodal transform per sensor is required");
  }
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    validate(s.sensors[j]);
    const auto& t = s.transforms[j];
    if (t.global_dim() != kStateDim || t.rank() != t.local_dim()) {
      throw std::invalid_argument(fmt::format("scenario: transform of sensor {} must have full row rank", j + 1));
    }
    // The sensor must only see states its node keeps.
    const Matrix h = s.sensors[j].is_linear() ? s.sensors[j].selector : Matrix(Matrix::Zero(0, kStateDim));
    if (h.rows() > 0 && (h * t.pinv() * t.matrix() - h).norm() > 1e-9) {
      throw std::invalid_argument(
          fmt::format("scenario: sensor {} observes states outside its local subspace", j + 1));
    }
  }
  if (s.x0.size() != kStateDim || s.initial_belief.dim() != kStateDim) {
    throw std::invalid_argument("scenario: initial state must have 6 components");
  }
  if (!is_valid_belief(s.initial_belief) || Eigen::LLT<Matrix>(s.initial_belief.cov).info() != Eigen::Success) {
    throw std::invalid_argument("scenario: initial covariance must be symmetric PD");
  }
  if (s.steps < 1) throw std::invalid_argument("scenario: trajectory length must be >= 1");
  if (!(s.inexact.q > 0.0)) throw std::invalid_argument("scenario: inexact q must be positive");
  if (s.time_variation.enabled()) {
    if (!(std::abs(s.time_variation.sigma) < 1.0)) throw std::invalid_argument("scenario: |sigma| must be < 1");
    if (s.time_variation.period < 1) throw std::invalid_argument("scenario: noise period must be >= 1");
  }
  nominal_noise(s);
  inexact_noise(s);
}

StackedCovariance nominal_noise(const Scenario& s) { return stacked_covariance(s.jammer, s.sensors); }

StackedCovariance true_noise(const Scenario& s, int k) {
  StackedCovariance r = nominal_noise(s);
  if (!s.time_variation.enabled()) return r;
  return time_varying_scale(r, k, s.time_variation.sigma, s.time_variation.period);
}

StackedCovariance inexact_noise(const Scenario& s) {
  if (s.inexact.noise_sources.size() != s.sensors.size()) {
    throw std::invalid_argument(fmt::format("scenario: inexact noise lists {} blocks for {} sensors",
                                            s.inexact.noise_sources.size(), s.sensors.size()));
  }
  std::vector<Matrix> blocks;
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    const int src = s.inexact.noise_sources[j];
    if (src < 1 || src > static_cast<int>(s.sensors.size())) {
      throw std::invalid_argument(fmt::format("scenario: inexact noise source {} is not a sensor id", src));
    }
    const Matrix& r = s.sensors[static_cast<std::size_t>(src - 1)].noise_cov;
    const int n = s.sensors[j].measurement_dim();
    if (r.rows() != n) {
      throw std::invalid_argument(fmt::format(
          "scenario: inexact noise block {} taken from sensor {} is {}x{}, but sensor {} measures {} components",
          j + 1, src, r.rows(), r.cols(), j + 1, n));
    }
    blocks.push_back(elementwise_sqrt(r));
  }
  return StackedCovariance::block_diagonal(blocks);
}

MotionModel inexact_motion(const Scenario& s) {
  MotionModel m = s.motion;
  m.q = s.inexact.q;
  return m;
}

// ---- text format ----------------------------------------------------------

namespace {

template <typename T>
T scalar(const YAML::Node& node, std::string_view context) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: expected a {} value", context, std::is_same_v<T, int> ? "integer" : "number"));
  }
}

std::vector<double> number_list(const YAML::Node& node, std::string_view context) {
  if (!node.IsSequence()) throw ConfigError(fmt::format("{}: expected a list of numbers", context));
  std::vector<double> out;
  for (const auto& v : node) out.push_back(scalar<double>(v, context));
  return out;
}

std::vector<int> int_list(const YAML::Node& node, std::string_view context) {
  if (!node.IsSequence()) throw ConfigError(fmt::format("{}: expected a list of integers", context));
  std::vector<int> out;
  for (const auto& v : node) out.push_back(scalar<int>(v, context));
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_keys(const YAML::Node& node, std::string_view context, const std::vector<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", context));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) reject_unknown_key(key, context, allowed);
  }
}

const YAML::Node required(const YAML::Node& node, const char* key, std::string_view context) {
  const YAML::Node v = node[key];
  if (!v) throw ConfigError(fmt::format("{}: missing required key '{}'", context, key));
  return v;
}

std::vector<int> rows_of(const Matrix& selector) {
  std::vector<int> rows;
  for (Eigen::Index r = 0; r < selector.rows(); ++r) {
    Eigen::Index c = 0;
    selector.row(r).maxCoeff(&c);
    rows.push_back(static_cast<int>(c));
  }
  return rows;
}

bool is_row_selector(const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (((m.row(r).array() != 0.0) && (m.row(r).array() != 1.0)).any() || m.row(r).sum() != 1.0) return false;
  }
  return true;
}

}  // namespace

Scenario parse_scenario_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("scenario: malformed YAML: {}", e.what()));
  }
  check_keys(root, "scenario", {"name", "steps", "motion", "sensors", "jammer", "initial", "inexact", "time_variation"});

  Scenario s;
  s.name = root["name"] ? root["name"].as<std::string>() : "custom";
  if (root["steps"]) s.steps = scalar<int>(root["steps"], "scenario.steps");

  const YAML::Node motion = required(root, "motion", "scenario");
  check_keys(motion, "scenario.motion", {"kind", "dt", "q", "turn_rate_deg"});
  try {
    s.motion.kind = motion_kind_from_string(required(motion, "kind", "scenario.motion").as<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("scenario.motion.kind: {}", e.what()));
  }
  if (motion["dt"]) s.motion.dt = scalar<double>(motion["dt"], "scenario.motion.dt");
  if (motion["q"]) s.motion.q = scalar<double>(motion["q"], "scenario.motion.q");
  if (motion["turn_rate_deg"]) {
    s.motion.omega = scalar<double>(motion["turn_rate_deg"], "scenario.motion.turn_rate_deg") * kDegToRad;
  }

  const YAML::Node jammer = required(root, "jammer", "scenario");
  check_keys(jammer, "scenario.jammer", {"std", "angular"});
  Vector jammer_std = to_vector(number_list(required(jammer, "std", "scenario.jammer"), "scenario.jammer.std"));
  if (jammer["angular"]) {
    for (int r : int_list(jammer["angular"], "scenario.jammer.angular")) {
      if (r < 0 || r >= jammer_std.size()) throw ConfigError("scenario.jammer.angular: index out of range");
      jammer_std(r) *= kDegToRad;
    }
  }
  s.jammer.r0 = diag_of_squares(jammer_std);

  const YAML::Node sensors = required(root, "sensors", "scenario");
  if (!sensors.IsSequence()) throw ConfigError("scenario.sensors: expected a list");
  int index = 0;
  for (const auto& node : sensors) {
    ++index;
    const std::string ctx = fmt::format("scenario.sensors[{}]", index);
    check_keys(node, ctx, {"id", "kind", "rows", "position", "transform", "noise_std", "jammer_rows", "jammer_beta"});
    SensorModel sensor;
    sensor.id = node["id"] ? scalar<int>(node["id"], ctx + ".id") : index;
    try {
      sensor.kind = measurement_kind_from_string(required(node, "kind", ctx).as<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}.kind: {}", ctx, e.what()));
    }
    Vector noise_std = to_vector(number_list(required(node, "noise_std", ctx), ctx + ".noise_std"));
    if (sensor.kind == MeasurementKind::kLinearSelector) {
      const auto rows = int_list(required(node, "rows", ctx), ctx + ".rows");
      try {
        sensor.selector = selector_rows(kStateDim, rows);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}.rows: {}", ctx, e.what()));
      }
    } else {
      if (noise_std.size() > 0 && sensor.kind == MeasurementKind::kAzimuthSpeed) noise_std(0) *= kDegToRad;
    }
    if (node["position"]) {
      const auto p = number_list(node["position"], ctx + ".position");
      if (p.size() != 3) throw ConfigError(ctx + ".position: expected 3 coordinates");
      sensor.position = Eigen::Vector3d(p[0], p[1], p[2]);
    } else if (!sensor.is_linear()) {
      throw ConfigError(ctx + ": missing required key 'position'");
    }
    sensor.noise_cov = diag_of_squares(noise_std);
    s.sensors.push_back(sensor);
    try {
      s.transforms.push_back(InternodalTransform::rows_of_identity(
          kStateDim, int_list(required(node, "transform", ctx), ctx + ".transform")));
      s.jammer.selectors.push_back(
          selector_rows(s.jammer.r0.rows(), int_list(required(node, "jammer_rows", ctx), ctx + ".jammer_rows")));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}: {}", ctx, e.what()));
    }
    s.jammer.betas.push_back(node["jammer_beta"] ? scalar<double>(node["jammer_beta"], ctx + ".jammer_beta") : 0.0);
  }

  const YAML::Node initial = required(root, "initial", "scenario");
  check_keys(initial, "scenario.initial", {"truth", "mean", "covariance_diag"});
  s.x0 = to_vector(number_list(required(initial, "truth", "scenario.initial"), "scenario.initial.truth"));
  s.initial_belief.mean =
      to_vector(number_list(required(initial, "mean", "scenario.initial"), "scenario.initial.mean"));
  s.initial_belief.cov = to_vector(number_list(required(initial, "covariance_diag", "scenario.initial"),
                                               "scenario.initial.covariance_diag"))
                             .asDiagonal();

  if (const YAML::Node inexact = root["inexact"]) {
    check_keys(inexact, "scenario.inexact", {"q", "noise_sources"});
    if (inexact["q"]) s.inexact.q = scalar<double>(inexact["q"], "scenario.inexact.q");
    if (inexact["noise_sources"]) {
      s.inexact.noise_sources = int_list(inexact["noise_sources"], "scenario.inexact.noise_sources");
    }
  }
  if (s.inexact.noise_sources.empty()) {
    for (std::size_t j = 0; j < s.sensors.size(); ++j) s.inexact.noise_sources.push_back(static_cast<int>(j) + 1);
  }
  if (const YAML::Node tv = root["time_variation"]) {
    check_keys(tv, "scenario.time_variation", {"sigma", "period"});
    if (tv["sigma"]) s.time_variation.sigma = scalar<double>(tv["sigma"], "scenario.time_variation.sigma");
    if (tv["period"]) s.time_variation.period = scalar<int>(tv["period"], "scenario.time_variation.period");
  }

  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("scenario '{}': {}", s.name, e.what()));
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_yaml(ss.str());
}

Scenario resolve_scenario(const std::string& name_or_path) {
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_scenario(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
  const std::string guess = nearest_key(name_or_path, names);
  throw ConfigError(fmt::format("unknown scenario '{}'{}; available: {}", name_or_path,
                                guess.empty() ? "" : fmt::format(" (did you mean '{}'?)", guess),
                                fmt::join(names, ", ")));
}

std::string dump_scenario_yaml(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << s.name;
  out << YAML::Key << "steps" << YAML::Value << s.steps;
  out << YAML::Key << "motion" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.motion.kind));
  out << YAML::Key << "dt" << YAML::Value << s.motion.dt;
  out << YAML::Key << "q" << YAML::Value << s.motion.q;
  if (s.motion.kind == MotionKind::kCoordinatedTurn) {
    out << YAML::Key << "turn_rate_deg" << YAML::Value << s.motion.omega / kDegToRad;
  }
  out << YAML::EndMap;

  auto flow_list = [&out](const auto& values) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : values) out << v;
    out << YAML::EndSeq;
  };

  // Jammer rows that feed an azimuth row are written in degrees.
  std::vector<int> angular;
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    if (s.sensors[j].kind != MeasurementKind::kAzimuthSpeed) continue;
    Eigen::Index c = 0;
    s.jammer.selectors[j].row(0).maxCoeff(&c);
    if (std::find(angular.begin(), angular.end(), static_cast<int>(c)) == angular.end()) {
      angular.push_back(static_cast<int>(c));
    }
  }
  std::sort(angular.begin(), angular.end());
  std::vector<double> jammer_std;
  for (Eigen::Index r = 0; r < s.jammer.r0.rows(); ++r) {
    double sd = std::sqrt(s.jammer.r0(r, r));
    if (std::find(angular.begin(), angular.end(), static_cast<int>(r)) != angular.end()) sd /= kDegToRad;
    jammer_std.push_back(sd);
  }
  out << YAML::Key << "jammer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "std" << YAML::Value;
  flow_list(jammer_std);
  if (!angular.empty()) {
    out << YAML::Key << "angular" << YAML::Value;
    flow_list(angular);
  }
  out << YAML::EndMap;

  out << YAML::Key << "sensors" << YAML::Value << YAML::BeginSeq;
  for (std::size_t j = 0; j < s.sensors.size(); ++j) {
    const SensorModel& sensor = s.sensors[j];
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << sensor.id;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(sensor.kind));
    if (sensor.is_linear()) {
      out << YAML::Key << "rows" << YAML::Value;
      flow_list(rows_of(sensor.selector));
    } else {
      out << YAML::Key << "position" << YAML::Value;
      flow_list(std::vector<double>{sensor.position.x(), sensor.position.y(), sensor.position.z()});
    }
    std::vector<double> sd;
    for (Eigen::Index r = 0; r < sensor.noise_cov.rows(); ++r) sd.push_back(std::sqrt(sensor.noise_cov(r, r)));
    if (sensor.kind == MeasurementKind::kAzimuthSpeed) sd[0] /= kDegToRad;
    out << YAML::Key << "noise_std" << YAML::Value;
    flow_list(sd);
    if (!is_row_selector(s.transforms[j].matrix())) {
      throw std::invalid_argument("dump_scenario_yaml: only row-selector transforms are representable");
    }
    out << YAML::Key << "transform" << YAML::Value;
    flow_list(rows_of(s.transforms[j].matrix()));
    out << YAML::Key << "jammer_rows" << YAML::Value;
    flow_list(rows_of(s.jammer.selectors[j]));
    out << YAML::Key << "jammer_beta" << YAML::Value << s.jammer.betas[j];
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "truth" << YAML::Value;
  flow_list(std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size()));
  out << YAML::Key << "mean" << YAML::Value;
  flow_list(std::vector<double>(s.initial_belief.mean.data(), s.initial_belief.mean.data() + s.x0.size()));
  const Vector d = s.initial_belief.cov.diagonal();
  out << YAML::Key << "covariance_diag" << YAML::Value;
  flow_list(std::vector<double>(d.data(), d.data() + d.size()));
  out << YAML::EndMap;

  out << YAML::Key << "inexact" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "q" << YAML::Value << s.inexact.q;
  out << YAML::Key << "noise_sources" << YAML::Value;
  flow_list(s.inexact.noise_sources);
  out << YAML::EndMap;
  if (s.time_variation.enabled()) {
    out << YAML::Key << "time_variation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sigma" << YAML::Value << s.time_variation.sigma;
    out << YAML::Key << "period" << YAML::Value << s.time_variation.period;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string scenario_fingerprint(const Scenario& scenario) { return sha256_hex(dump_scenario_yaml(scenario)); }

}  // namespace infofuse
