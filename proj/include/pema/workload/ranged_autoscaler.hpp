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
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pema/control/controller.hpp"
#include "pema/workload/ranges.hpp"

namespace pema::workload {

struct RangedConfig {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t initial_ranges = 1;
  double min_width = 25.0;
  bool splitting = true;
  SplitPolicy split;
  double slope_ms_per_rps = 0.0;
};

// One controller per workload range, run pseudo-parallel: each interval only
// the controller owning the current workload acts. Splitting a converged range
// hands the upper half to the existing controller and bootstraps the lower
// half from its current allocation and thresholds.
class RangedAutoscaler {
 public:
  RangedAutoscaler(control::PemaParams params, sim::Allocation initial, RangedConfig config,
                   std::uint64_t seed);

  struct Active {
    int node = -1;
    int controller = -1;
    bool clamped = false;
    double target_ms = 0.0;
  };

  struct StepResult {
    control::Decision decision;
    Active active;
    std::optional<RangeTree::Split> split;
  };

  // Range, controller and latency target for workload `lambda`.
  Active activate(double lambda) const;
  // Allocation to apply for workload `lambda`: the active controller's latest.
  const sim::Allocation& allocation_for(double lambda) const;

  // Feeds the sample to the controller owning sample.lambda, then splits the
  // range if it has converged.
  StepResult step(const sim::MetricsSample& sample);

  const RangeTree& tree() const { return tree_; }
  const control::PemaController& controller(int id) const { return controllers_.at(static_cast<std::size_t>(id)); }
  std::size_t controller_count() const { return controllers_.size(); }

  void set_slope(double slope_ms_per_rps) { tree_.set_all_slopes(slope_ms_per_rps); }
  void set_r_slo(double r_slo_ms);
  double r_slo_ms() const { return r_slo_ms_; }

 private:
  std::uint64_t seed_for(int controller_id) const;

  RangedConfig config_;
  RangeTree tree_;
  double r_slo_ms_;
  std::uint64_t seed_;
  std::vector<control::PemaController> controllers_;
  std::map<int, std::deque<double>> totals_by_node_;
};

}  // namespace pema::workload
