// Copyright 2026 The PEMA Lab Authors.
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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pema/experiment/config.hpp"
#include "pema/experiment/report.hpp"
#include "pema/experiment/runner.hpp"

namespace {

namespace ex = pema::experiment;

int run_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out, const std::optional<std::size_t>& steps) {
  ex::ExperimentConfig config = ex::load_config(config_path);
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;
  if (steps) config.steps = *steps;
  const auto result = ex::run(config);
  const auto& s = result.summary;
  fmt::print("{} {} lambda={:g} steps={} final_cpu={:.1f} steady_cpu={:.2f} violations={}\n",
             s.allocator, s.workload, s.lambda, s.steps, s.final_total_cpu, s.steady_total_cpu,
             s.violation_count);
  fmt::print("wrote {}\n", config.output_dir.string());
  return 0;
}

int compare_command(const std::vector<std::string>& dirs, const std::optional<std::string>& out) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const auto rows = ex::compare_dirs(paths);
  fmt::print("{}", ex::format_comparison(rows));
  if (out) ex::write_comparison_csv(rows, *out);
  return 0;
}

int sweep_command(const std::string& config_path, const std::string& param,
                  const std::vector<double>& values, const std::optional<std::string>& out) {
  ex::ExperimentConfig config = ex::load_config(config_path);
  if (out) config.output_dir = *out;
  const auto rows = ex::sweep(config, param, values);
  fmt::print("{}", ex::format_sweep(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated autoscaling lab: PEMA, rule-based and optimum allocators"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  std::optional<std::size_t> run_steps;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Override the output directory");
  run->add_option("--steps", run_steps, "Override the number of intervals");

  std::vector<std::string> compare_dirs;
  std::optional<std::string> compare_out;
  auto* compare = app.add_subcommand("compare", "Compare finished runs");
  compare->add_option("dirs", compare_dirs, "Run directories")->required()->check(CLI::ExistingDirectory);
  compare->add_option("--out", compare_out, "Write the comparison as CSV");

  std::string sweep_config;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Sweep one controller parameter");
  sweep->add_option("--config", sweep_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_param, "alpha, beta, explore_a or explore_b")->required();
  sweep->add_option("--values", sweep_values, "Values to try")->required();
  sweep->add_option("--out", sweep_out, "Override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_config, run_seed, run_out, run_steps);
    if (*compare) return compare_command(compare_dirs, compare_out);
    if (*sweep) return sweep_command(sweep_config, sweep_param, sweep_values, sweep_out);
  } catch (const std::exception& e) {
    fmt::print(stderr, "pema-lab: {}\n", e.what());
    return 1;
  }
  return 1;
}
