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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pema/experiment/config.hpp"
#include "pema/experiment/runner.hpp"

namespace pema::experiment {

struct ComparisonRow {
  std::string workload;
  double lambda = 0.0;
  double optm_total = 0.0;  // NaN when no OPTM run covers the level
  double pema_total = 0.0;  // NaN when absent
  double rule_total = 0.0;  // NaN when absent
  double pema_normalized = 0.0;
  double rule_normalized = 0.0;
  double savings_pct = 0.0;  // (rule - pema) / rule * 100
};

// (rule - pema) / rule, in percent.
double savings_percent(double pema_total, double rule_total);

// One row per workload level, allocator totals averaged across repeated runs.
// Throws ConfigError when the summaries disagree on the scenario.
std::vector<ComparisonRow> compare(std::span<const Summary> summaries);
std::vector<ComparisonRow> compare_dirs(std::span<const std::filesystem::path> run_dirs);

void write_comparison_csv(std::span<const ComparisonRow> rows, const std::filesystem::path& path);
std::string format_comparison(std::span<const ComparisonRow> rows);

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::size_t runs = 0;
  double mean_normalized_total = 0.0;
  double mean_violations = 0.0;
};

// Applies `value` to the named controller parameter (alpha, beta, explore_a,
// explore_b). Throws ConfigError for anything else.
void set_sweep_param(ExperimentConfig& config, const std::string& param, double value);

// One run per value per seed (config.sweep_seeds, or config.seed alone),
// written under output_dir/<param>_<value>/seed_<seed>, plus sweep.csv.
std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& param,
                            std::span<const double> values);

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
std::string format_sweep(std::span<const SweepRow> rows);

}  // namespace pema::experiment
