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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pema/baselines/rule.hpp"
#include "pema/control/params.hpp"
#include "pema/sim/scenario.hpp"

namespace pema::experiment {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AllocatorKind { kPema, kRule, kOptm };

std::string_view to_string(AllocatorKind kind);
AllocatorKind allocator_from_string(std::string_view text);

struct RangeSpec {
  double min_rps = 0.0;
  double max_rps = 0.0;
  std::size_t initial_ranges = 1;
  double min_width_rps = 25.0;
  bool split = true;
  double split_epsilon = 0.02;
  std::size_t split_window = 10;
  double slope_ms_per_rps = 0.0;
  // Intervals spent at a fixed allocation to fit the slope before control
  // starts; 0 keeps `slope_ms_per_rps`.
  std::size_t learn_slope_steps = 0;
};

// Mid-run perturbation applied before interval `step` (0-based) is simulated.
struct Event {
  std::size_t step = 0;
  std::optional<double> demand_scale;  // relative to the scenario as loaded
  std::optional<double> r_slo_ms;
};

struct ExperimentConfig {
  std::filesystem::path scenario_path;
  std::optional<double> constant_rps;
  std::optional<std::filesystem::path> trace_path;
  AllocatorKind allocator = AllocatorKind::kPema;
  control::PemaParams pema;
  baselines::RuleParams rule;
  std::optional<RangeSpec> ranges;
  double initial_utilization = 0.15;
  std::filesystem::path output_dir = "runs/out";
  std::uint64_t seed = 1;
  std::size_t steps = 100;
  std::vector<std::uint64_t> sweep_seeds;
  std::optional<std::filesystem::path> optm_cache_dir;
  std::vector<Event> events;
};

// Parses a JSON experiment document. Relative scenario/trace/cache paths are
// resolved against `base_dir`. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace pema::experiment
