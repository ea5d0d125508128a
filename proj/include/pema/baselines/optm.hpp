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

#include "pema/sim/allocation.hpp"
#include "pema/sim/scenario.hpp"

namespace pema::baselines {

class OptmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptmResult {
  sim::Allocation x_opt;
  double total_cores = 0.0;
  std::size_t evaluations = 0;
  double r_ms = 0.0;  // noise-free latency at x_opt
};

// Allocation at which every service runs at `utilization` of its allocation
// under workload `lambda`, rounded up to a quantum and at least `floor_quanta`.
sim::Allocation ample_allocation(const sim::Scenario& scenario, double lambda,
                                 double utilization = 0.15, int floor_quanta = 1);

// Greedy single-quantum descent on the noise-free latency. Each round removes
// one quantum from the service whose cut leaves the lowest latency while
// staying within `r_slo_ms` (ties to the lowest index). Stops at a point where
// every single-quantum cut violates. Throws OptmError if `start` violates.
OptmResult optm_search(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                       const sim::Allocation& start, int floor_quanta = 1);

// Same, starting from `ample_allocation(scenario, lambda)`.
OptmResult optm_search(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                       int floor_quanta = 1);

// True when `x` meets the target and every single-quantum cut breaks it.
bool is_optm_fixed_point(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                         const sim::Allocation& x, int floor_quanta = 1);

// On-disk memo of optimum searches keyed by (scenario digest, lambda, target).
class OptmCache {
 public:
  explicit OptmCache(std::filesystem::path directory);

  std::optional<OptmResult> get(const sim::Scenario& scenario, double lambda,
                                double r_slo_ms) const;
  void put(const sim::Scenario& scenario, double lambda, double r_slo_ms,
           const OptmResult& result) const;

  // Looks the result up and runs the search on a miss.
  OptmResult search(const sim::Scenario& scenario, double lambda, double r_slo_ms) const;

 private:
  std::filesystem::path path_for(const sim::Scenario& scenario, double lambda,
                                 double r_slo_ms) const;

  std::filesystem::path directory_;
};

}  // namespace pema::baselines
