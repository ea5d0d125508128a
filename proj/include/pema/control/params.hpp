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
#include <vector>

#include "pema/sim/simulator.hpp"
#include "pema/telemetry/metrics_window.hpp"

namespace pema::control {

struct PemaParams {
  double r_slo_ms = 250.0;
  double alpha = 0.5;           // (0, 1]; smaller reduces more aggressively
  double beta = 0.3;            // (0, 1]; largest per-step fractional cut
  double explore_a = 0.05;      // exploration probability span
  double explore_b = 0.005;     // exploration probability floor
  std::size_t window_k = telemetry::kDefaultWindow;
  double interval_s = sim::kDefaultIntervalSeconds;
  int floor_quanta = 1;         // minimum per-service allocation, in quanta
  double u_init = 0.15;
  double h_init = 0.0;
  // Scales the latency target used for reduction sizing. 1.0 disables the
  // buffer; 0.95 keeps five percent of headroom.
  double buffer_fraction = 1.0;
  // Drop RHDb entries contradicted by later violations when rolling back.
  bool skip_superseded_history = true;

  // Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

// Learned per-service bottleneck thresholds. Both only ever grow.
struct ThresholdState {
  std::vector<double> u_th;
  std::vector<double> h_th;

  static ThresholdState initial(std::size_t services, const PemaParams& params);
  bool operator==(const ThresholdState&) const = default;
};

}  // namespace pema::control
