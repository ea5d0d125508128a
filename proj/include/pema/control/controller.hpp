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
#include <random>
#include <string_view>
#include <vector>

#include "pema/control/params.hpp"
#include "pema/rhdb/rhdb.hpp"
#include "pema/sim/allocation.hpp"
#include "pema/sim/simulator.hpp"
#include "pema/telemetry/metrics_window.hpp"

namespace pema::control {

enum class Action { kReduce, kHold, kRollback, kExplore };

std::string_view to_string(Action action);

struct Decision {
  sim::Allocation next;
  Action action = Action::kHold;
  double target_ms = 0.0;      // target the sample was judged against
  double r_eff_ms = 0.0;       // moving-average latency
  double explore_p = 0.0;
  std::size_t count = 0;       // n_t
  double delta = 0.0;          // fractional cut
  std::vector<std::size_t> targets;
};

// One feedback controller instance. Owns its thresholds, metrics window,
// history database and random stream; never shared between workers.
class PemaController {
 public:
  PemaController(PemaParams params, sim::Allocation initial, std::uint64_t seed);
  // Bootstrapped controller that starts from another controller's state.
  PemaController(PemaParams params, sim::Allocation initial, ThresholdState thresholds,
                 std::uint64_t seed);

  // Consumes the sample produced by `allocation()` over the last interval and
  // returns the allocation for the next one. `target_ms` is the latency target
  // in force for the sample's workload.
  Decision step(const sim::MetricsSample& sample, double target_ms);
  Decision step(const sim::MetricsSample& sample) { return step(sample, params_.r_slo_ms); }

  const PemaParams& params() const { return params_; }
  void set_r_slo(double r_slo_ms);

  const sim::Allocation& allocation() const { return x_; }
  const sim::Allocation& initial_allocation() const { return initial_; }
  const ThresholdState& thresholds() const { return thresholds_; }
  const rhdb::Rhdb& history() const { return history_; }
  const telemetry::MetricsWindow& window() const { return window_; }

 private:
  rhdb::Eligibility eligibility() const;

  PemaParams params_;
  sim::Allocation initial_;
  sim::Allocation x_;
  ThresholdState thresholds_;
  telemetry::MetricsWindow window_;
  rhdb::Rhdb history_;
  std::mt19937_64 rng_;
};

}  // namespace pema::control
