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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pema/baselines/optm.hpp"
#include "pema/experiment/config.hpp"
#include "pema/rhdb/rhdb.hpp"
#include "pema/sim/scenario.hpp"

namespace pema::experiment {

struct IntervalRow {
  std::int64_t t = 0;
  double lambda = 0.0;
  double range_hi = 0.0;
  double r_ms = 0.0;
  double target_ms = 0.0;
  double total_cpu = 0.0;     // allocation applied during the interval
  std::string action;
  bool violated = false;      // r_ms > target_ms
  int controller = -1;
  sim::Allocation x;
  std::vector<double> u;
  std::vector<double> h;
};

struct Summary {
  std::string allocator;
  std::string scenario_digest;
  std::string workload;       // "constant" or "trace"
  double lambda = 0.0;        // constant rate, or mean rate of the trace
  double r_slo_ms = 0.0;
  std::size_t steps = 0;
  double final_total_cpu = 0.0;
  double steady_total_cpu = 0.0;  // mean applied total over the last 20 intervals
  std::size_t violation_count = 0;
  std::size_t iterations_to_convergence = 0;
  std::size_t evaluations = 0;
  sim::Allocation final_x;
};

struct RhdbSnapshot {
  double lo = 0.0;
  double hi = 0.0;
  int controller = -1;
  rhdb::Rhdb db{0};
};

struct RunResult {
  std::vector<IntervalRow> rows;
  Summary summary;
  std::vector<std::string> log;
  std::vector<RhdbSnapshot> histories;
  std::optional<baselines::OptmResult> optm;
};

// Resolved per-interval workload for a config (constant or trace replay).
std::vector<double> workload_series(const ExperimentConfig& config);

// Runs the interval loop in memory; no files are touched.
RunResult run_experiment(const ExperimentConfig& config, const sim::Scenario& scenario,
                         std::span<const double> lambdas);

// Loads inputs, runs, and writes intervals.csv, summary.csv, run.log and the
// RHDb files under `config.output_dir`.
RunResult run(const ExperimentConfig& config);

void write_intervals_csv(const RunResult& result, const sim::Scenario& scenario,
                         const std::filesystem::path& path);
void write_summary_csv(const Summary& summary, const std::filesystem::path& path);
Summary read_summary_csv(const std::filesystem::path& path);

}  // namespace pema::experiment
