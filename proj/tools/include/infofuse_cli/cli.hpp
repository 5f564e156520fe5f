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

// Run configuration and the commands behind the infofuse executable.

#ifndef INFOFUSE_CLI_CLI_HPP_
#define INFOFUSE_CLI_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infofuse/dataset.hpp"
#include "infofuse/training.hpp"

namespace infofuse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitVerification = 2,
  kExitRuntime = 3,
};

// Required input (dataset, models) is absent; maps to kExitUsage.
class MissingInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario = "linear-cv";
  std::uint64_t seed = 1;
  std::string out = "runs/default";
  int threads = 1;
  std::string methods = "all";
  std::string dataset;  // default <out>/dataset
  std::string models;   // default <out>/models
  SplitSizes splits;
  TrainingConfig training;
  bool resume = false;
  std::vector<double> sigmas;  // empty means the default grid
  int bench_reps = 20;
  bool svg = true;

  std::string dataset_dir() const;
  std::string models_dir() const;
  std::string report_dir() const;
};

// Strict: unknown keys raise ConfigError with the nearest valid key.
// Values not present keep what `base` holds.
RunConfig parse_run_config(const std::string& yaml_text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// Each command writes under config.out and returns an exit code. Errors
// propagate as exceptions; run_command maps them to codes.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_bench(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

// Full command line, including the program name in argv[0].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infofuse::cli

#endif  // INFOFUSE_CLI_CLI_HPP_
