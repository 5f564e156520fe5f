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

#include "infofuse_cli/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "infofuse/checkpoint.hpp"
#include "infofuse/config_keys.hpp"
#include "infofuse/experiments.hpp"
#include "infofuse/verification.hpp"

namespace infofuse::cli {

namespace fs = std::filesystem;

namespace {

void check_keys(const YAML::Node& node, std::string_view context, const std::vector<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", context));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) reject_unknown_key(key, context, allowed);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, std::string_view context, T& value) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    value = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}.{}: invalid value '{}'", context, key, YAML::Dump(v)));
  }
}

void parse_training(const YAML::Node& node, TrainingConfig& t) {
  check_keys(node, "training",
             {"learning_rate", "batch_size", "gamma", "decoupled_decay", "epochs", "beta1", "beta2", "epsilon",
              "schedule", "gradient_mode", "hidden_factor", "identity_anchor", "scale_trajectories"});
  read(node, "learning_rate", "training", t.learning_rate);
  read(node, "batch_size", "training", t.batch_size);
  read(node, "gamma", "training", t.gamma);
  read(node, "decoupled_decay", "training", t.decoupled_decay);
  read(node, "epochs", "training", t.epochs);
  read(node, "beta1", "training", t.beta1);
  read(node, "beta2", "training", t.beta2);
  read(node, "epsilon", "training", t.epsilon);
  read(node, "hidden_factor", "training", t.hidden_factor);
  read(node, "identity_anchor", "training", t.identity_anchor);
  read(node, "scale_trajectories", "training", t.scale_trajectories);
  if (const YAML::Node g = node["gradient_mode"]) {
    const auto mode = g.as<std::string>();
    if (mode == "local") {
      t.gradient_mode = GradientMode::kLocal;
    } else if (mode == "exact") {
      t.gradient_mode = GradientMode::kExact;
    } else {
      throw ConfigError(fmt::format("training.gradient_mode: '{}' is not one of local, exact", mode));
    }
  }
  if (const YAML::Node s = node["schedule"]) {
    check_keys(s, "training.schedule", {"kind", "lr_min", "lr_max", "period"});
    std::string kind = "fixed";
    read(s, "kind", "training.schedule", kind);
    if (kind == "fixed") {
      t.schedule.kind = LrSchedule::Kind::kFixed;
    } else if (kind == "cyclic") {
      t.schedule.kind = LrSchedule::Kind::kCyclic;
    } else {
      throw ConfigError(fmt::format("training.schedule.kind: '{}' is not one of fixed, cyclic", kind));
    }
    read(s, "lr_min", "training.schedule", t.schedule.lr_min);
    read(s, "lr_max", "training.schedule", t.schedule.lr_max);
    read(s, "period", "training.schedule", t.schedule.period);
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Loads the dataset, generating it first when the default location is empty.
Dataset obtain_dataset(const RunConfig& config, const Scenario& scenario, std::ostream& log) {
  const fs::path dir = config.dataset_dir();
  if (fs::exists(dir / "manifest.json")) return load_dataset(dir, scenario);
  if (!config.dataset.empty()) throw MissingInput(fmt::format("no dataset at {}", dir.string()));
  log << fmt::format("no dataset at {}; simulating one with seed {}\n", dir.string(), config.seed);
  Dataset d = generate_dataset(scenario, config.splits, config.seed, config.threads);
  save_dataset(d, scenario, dir);
  return d;
}

std::vector<DifnetModel> obtain_models(const RunConfig& config, const Scenario& scenario) {
  const fs::path dir = config.models_dir();
  if (!fs::exists(dir / "node_1.difn")) {
    throw MissingInput(fmt::format("no trained models at {}; run 'train' first or drop difnet from --methods",
                                   dir.string()));
  }
  return load_models(dir, static_cast<int>(scenario.num_sensors()));
}

bool needs_models(const std::vector<Method>& methods) {
  return std::find(methods.begin(), methods.end(), Method::kDifnet) != methods.end();
}

}  // namespace

std::string RunConfig::dataset_dir() const { return dataset.empty() ? (fs::path(out) / "dataset").string() : dataset; }
std::string RunConfig::models_dir() const { return models.empty() ? (fs::path(out) / "models").string() : models; }
std::string RunConfig::report_dir() const { return (fs::path(out) / "report").string(); }

RunConfig parse_run_config(const std::string& yaml_text, RunConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  if (!root || root.IsNull()) return base;
  check_keys(root, "config",
             {"scenario", "seed", "out", "threads", "methods", "dataset", "models", "splits", "training", "sweep",
              "bench", "report"});
  read(root, "scenario", "config", base.scenario);
  read(root, "seed", "config", base.seed);
  read(root, "out", "config", base.out);
  read(root, "threads", "config", base.threads);
  read(root, "dataset", "config", base.dataset);
  read(root, "models", "config", base.models);
  if (const YAML::Node m = root["methods"]) {
    if (m.IsSequence()) {
      std::string joined;
      for (const auto& e : m) joined += (joined.empty() ? "" : ",") + e.as<std::string>();
      base.methods = joined;
    } else {
      base.methods = m.as<std::string>();
    }
    parse_method_list(base.methods);
  }
  if (const YAML::Node s = root["splits"]) {
    check_keys(s, "splits", {"train", "cv", "test"});
    read(s, "train", "splits", base.splits.train);
    read(s, "cv", "splits", base.splits.cv);
    read(s, "test", "splits", base.splits.test);
  }
  if (const YAML::Node t = root["training"]) parse_training(t, base.training);
  if (const YAML::Node s = root["sweep"]) {
    check_keys(s, "sweep", {"sigmas"});
    read(s, "sigmas", "sweep", base.sigmas);
  }
  if (const YAML::Node b = root["bench"]) {
    check_keys(b, "bench", {"reps"});
    read(b, "reps", "bench", base.bench_reps);
  }
  if (const YAML::Node r = root["report"]) {
    check_keys(r, "report", {"svg"});
    read(r, "svg", "report", base.svg);
  }
  if (base.threads < 1) throw ConfigError("threads must be >= 1");
  if (base.bench_reps < 2) throw ConfigError("bench.reps must be >= 2");
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const Dataset d = generate_dataset(scenario, config.splits, config.seed, config.threads);
  const std::string hash = save_dataset(d, scenario, config.dataset_dir());
  log << fmt::format("wrote {} trajectories ({}/{}/{}) to {}\ncontent hash {}\n", config.splits.total(),
                     config.splits.train, config.splits.cv, config.splits.test, config.dataset_dir(), hash);
  return kExitOk;
}

int cmd_train(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const Dataset dataset = obtain_dataset(config, scenario, log);
  TrainingConfig tc = config.training;
  tc.seed = config.seed;
  tc.threads = config.threads;
  validate(tc, static_cast<int>(dataset.train.size()));

  const fs::path out(config.out);
  TrainingState state;
  if (config.resume && fs::exists(out / "checkpoint" / "state.json")) {
    state = load_training(out, static_cast<int>(scenario.num_sensors()));
    log << fmt::format("resuming after epoch {}\n", state.epoch);
  } else {
    state = initial_training_state(scenario, dataset, tc);
  }

  std::map<std::string, std::string> manifest{
      {"scenario", scenario.name},
      {"scenario_sha256", scenario_fingerprint(scenario)},
      {"dataset", config.dataset_dir()},
      {"seed", std::to_string(config.seed)},
      {"epochs", std::to_string(tc.epochs)},
      {"learning_rate", fmt::format("{}", tc.learning_rate)},
      {"batch_size", std::to_string(tc.batch_size)},
      {"gamma", fmt::format("{}", tc.gamma)},
      {"schedule", tc.schedule.kind == LrSchedule::Kind::kCyclic ? "cyclic" : "fixed"},
      {"hidden_factor", std::to_string(tc.hidden_factor)},
      {"created", timestamp()},
  };
  save_training(out, state, manifest);
  const auto start = std::chrono::steady_clock::now();
  train(state, scenario, dataset, tc, [&](const TrainingState& s) {
    save_training(out, s, manifest);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string cv;
    for (const auto& r : s.history) {
      if (r.epoch == s.epoch) cv += fmt::format(" {:.4g}", r.cv_loss);
    }
    log << fmt::format("epoch {:4d} {:7.1f}s cv{}{}\n", s.epoch, secs, cv, s.best_epoch == s.epoch ? " *" : "")
        << std::flush;
  });
  log << fmt::format("best cv at epoch {}; models in {}\n", state.best_epoch, (out / "models").string());
  if (state.skipped_trajectories > 0) {
    log << fmt::format("{} training trajectories failed numerically and were skipped\n",
                       state.skipped_trajectories);
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const std::vector<Method> methods = parse_method_list(config.methods);
  std::vector<DifnetModel> models;
  if (needs_models(methods)) models = obtain_models(config, scenario);
  const Dataset dataset = obtain_dataset(config, scenario, log);

  std::vector<MethodReport> reports;
  for (Method m : methods) {
    reports.push_back(evaluate_method(scenario, m, dataset.test, models.empty() ? nullptr : &models,
                                      config.threads));
  }
  const fs::path dir(config.report_dir());
  write_file(dir / "rmse.csv", rmse_csv(reports));
  write_file(dir / "rmse_stderr.csv", rmse_stderr_csv(reports));
  write_file(dir / "summary.csv", summary_csv(reports));
  write_file(dir / "divergence.csv", divergence_csv(reports));
  write_file(dir / "methods.csv", methods_csv(scenario, methods));
  if (config.svg) {
    for (std::size_t j = 0; j < scenario.num_sensors(); ++j) {
      write_file(dir / fmt::format("rmse_position_sensor{}.svg", j + 1), rmse_svg(reports, static_cast<int>(j)));
      write_file(dir / fmt::format("rmse_velocity_sensor{}.svg", j + 1),
                 rmse_svg(reports, static_cast<int>(j), true));
    }
  }

  log << fmt::format("{:<18}", "position RMSE");
  for (std::size_t j = 0; j < scenario.num_sensors(); ++j) log << fmt::format("{:>12}", fmt::format("sensor {}", j + 1));
  log << fmt::format("{:>10}\n", "diverged");
  for (const auto& r : reports) {
    log << fmt::format("{:<18}", to_string(r.method));
    for (std::size_t j = 0; j < scenario.num_sensors(); ++j) {
      log << fmt::format("{:12.4f}", r.mean_position(static_cast<int>(j)));
    }
    log << fmt::format("{:10d}\n", static_cast<int>(r.diverged.size()));
  }
  log << fmt::format("(mean over steps {}-{} on {} test trajectories; reports in {})\n", kSummaryFirstStep,
                     kSummaryLastStep, dataset.test.size(), dir.string());
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const std::vector<Method> methods = parse_method_list(config.methods);
  std::vector<DifnetModel> models;
  if (needs_models(methods)) models = obtain_models(config, scenario);
  const Dataset dataset = obtain_dataset(config, scenario, log);
  const std::vector<double> sigmas = config.sigmas.empty() ? default_sigma_grid() : config.sigmas;
  const auto rows = sigma_sweep(scenario, sigmas, dataset.test, dataset.seed,
                                dataset.sizes.train + dataset.sizes.cv, methods,
                                models.empty() ? nullptr : &models, config.threads);
  const fs::path path = fs::path(config.report_dir()) / "sweep.csv";
  write_file(path, sweep_csv(rows));
  log << fmt::format("{:<18}{:>8}", "method", "sigma");
  for (std::size_t j = 0; j < scenario.num_sensors(); ++j) log << fmt::format("{:>12}", fmt::format("sensor {}", j + 1));
  log << "\n";
  for (std::size_t i = 0; i < rows.size(); i += scenario.num_sensors()) {
    log << fmt::format("{:<18}{:8.2f}", to_string(rows[i].method), rows[i].sigma);
    for (std::size_t j = 0; j < scenario.num_sensors(); ++j) log << fmt::format("{:12.4f}", rows[i + j].mean_rmse_position);
    log << "\n";
  }
  log << fmt::format("wrote {}\n", path.string());
  return kExitOk;
}

int cmd_bench(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const std::vector<Method> methods = parse_method_list(config.methods);
  std::vector<DifnetModel> models;
  if (needs_models(methods)) models = obtain_models(config, scenario);
  const Dataset dataset = obtain_dataset(config, scenario, log);
  const auto results =
      bench_fusion_time(scenario, methods, dataset.test, config.bench_reps, models.empty() ? nullptr : &models);
  const fs::path path = fs::path(config.report_dir()) / "bench.csv";
  write_file(path, bench_csv(results));
  log << fmt::format("{:<18}{:>16}{:>10}{:>12}\n", "method", "median us/step", "ratio", "drift");
  for (const auto& r : results) {
    const double drift = std::abs(r.ratio_first_half - r.ratio_second_half) / r.ratio;
    log << fmt::format("{:<18}{:16.3f}{:10.4f}{:11.1f}%\n", to_string(r.method), r.median_seconds * 1e6, r.ratio,
                       100.0 * drift);
  }
  log << fmt::format("({} repetitions over {} test trajectories; wrote {})\n", config.bench_reps,
                     dataset.test.size(), path.string());
  return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  const Scenario scenario = resolve_scenario(config.scenario);
  const VerificationReport report = verify_scenario(scenario, config.seed);
  std::vector<Trajectory> trajs;
  for (int l = 0; l < config.splits.test; ++l) trajs.push_back(simulate_trajectory(scenario, config.seed, l));
  const EquivalenceReport eq = centralized_equivalence(scenario, trajs, config.threads);
  write_file(fs::path(config.report_dir()) / "verify.csv", verification_csv(report));

  const bool identities = report.max_exact < kIdentityTolerance;
  const bool power = report.max_perturbed > kPowerThreshold;
  const bool equivalent = eq.max_mean_deviation < kIdentityTolerance && eq.max_cov_deviation < kIdentityTolerance;
  auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  log << fmt::format("assimilation identities ({} steps)  max residual {:.3e}  (< {:.0e})  {}\n", report.rows.size(),
                     report.max_exact, kIdentityTolerance, mark(identities));
  log << fmt::format("mismatched-R power check            max residual {:.3e}  (> {:.0e})  {}\n",
                     report.max_perturbed, kPowerThreshold, mark(power));
  log << fmt::format("dif-exact vs centralized ({} steps)  mean {:.3e}  cov {:.3e}  (< {:.0e})  {}\n",
                     eq.steps_checked, eq.max_mean_deviation, eq.max_cov_deviation, kIdentityTolerance,
                     mark(equivalent));
  return identities && power && equivalent ? kExitOk : kExitVerification;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized information fusion with learned fusion weights"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  struct Flags {
    std::string config, scenario, out, methods, dataset, models;
    std::uint64_t seed = 0;
    int threads = 0, epochs = 0, reps = 0;
    std::vector<double> sigmas;
    bool resume = false, no_svg = false;
  } f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "YAML run configuration");
    sub->add_option("--scenario", f.scenario, "Built-in scenario name or scenario file");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--dataset", f.dataset, "Dataset directory (default <out>/dataset)");
  };
  auto with_methods = [&](CLI::App* sub) {
    sub->add_option("--methods", f.methods, "Comma-separated methods or 'all'");
    sub->add_option("--models", f.models, "Trained model directory (default <out>/models)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Generate train/cv/test trajectories");
  common(simulate);
  CLI::App* train_cmd = app.add_subcommand("train", "Train the per-node fusion networks");
  common(train_cmd);
  train_cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  train_cmd->add_flag("--resume", f.resume, "Continue from <out>/checkpoint");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Per-step RMSE of each method on the test split");
  common(evaluate);
  with_methods(evaluate);
  evaluate->add_flag("--no-svg", f.no_svg, "Skip SVG charts");
  CLI::App* sweep = app.add_subcommand("sweep-sigma", "Evaluate under time-varying noise scales");
  common(sweep);
  with_methods(sweep);
  sweep->add_option("--sigmas", f.sigmas, "Noise-variation amplitudes in (-1, 1)")->delimiter(',');
  CLI::App* bench = app.add_subcommand("bench", "Time the fusion step relative to dif-exact");
  common(bench);
  with_methods(bench);
  bench->add_option("--reps", f.reps, "Repetitions (first is a warm-up)")->check(CLI::Range(2, 1000000));
  CLI::App* verify = app.add_subcommand("verify", "Check the exact-fusion identities on a linear scenario");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    RunConfig config;
    if (!f.config.empty()) config = load_run_config(f.config, config);
    auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
    if (given("--scenario")) config.scenario = f.scenario;
    if (given("--seed")) config.seed = f.seed;
    if (given("--out")) config.out = f.out;
    if (given("--threads")) config.threads = f.threads;
    if (given("--dataset")) config.dataset = f.dataset;
    if (given("--methods")) config.methods = f.methods;
    if (given("--models")) config.models = f.models;
    if (given("--epochs")) config.training.epochs = f.epochs;
    if (given("--reps")) config.bench_reps = f.reps;
    if (given("--sigmas")) config.sigmas = f.sigmas;
    if (f.resume) config.resume = true;
    if (f.no_svg) config.svg = false;
    parse_method_list(config.methods);

    if (sub == simulate) return cmd_simulate(config, out);
    if (sub == train_cmd) return cmd_train(config, out);
    if (sub == evaluate) return cmd_evaluate(config, out);
    if (sub == sweep) return cmd_sweep(config, out);
    if (sub == bench) return cmd_bench(config, out);
    return cmd_verify(config, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const MissingInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace infofuse::cli
