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
#include <deque>
#include <span>
#include <vector>

#include "pema/sim/allocation.hpp"
#include "pema/sim/simulator.hpp"

namespace pema::baselines {

// Kubernetes-style percentile sizing.
struct RuleParams {
  double overprovision = 1.15;
  double percentile = 0.9;
  std::size_t lookback = 10;
  int floor_quanta = 1;
};

// Nearest-rank percentile: the ceil(q * n)-th smallest value (1-based).
double percentile_nearest_rank(std::vector<double> values, double q);

// Cores actually consumed per service: u_i * x_i.
std::vector<double> usage_cores(const sim::MetricsSample& sample, const sim::Allocation& applied);

// Unquantized target: overprovision * percentile(usage) per service over the
// last `lookback` rows of `usage_history`.
std::vector<double> rule_target_cores(std::span<const std::vector<double>> usage_history,
                                      const RuleParams& params);

// Quantized-up target with the floor applied. Throws on empty history.
sim::Allocation rule_step(std::span<const std::vector<double>> usage_history,
                          const RuleParams& params);

// Keeps the usage lookback and produces the next allocation each interval.
class RuleAutoscaler {
 public:
  RuleAutoscaler(RuleParams params, sim::Allocation initial);

  sim::Allocation observe(const sim::MetricsSample& sample);
  const sim::Allocation& allocation() const { return x_; }

 private:
  RuleParams params_;
  sim::Allocation x_;
  std::deque<std::vector<double>> history_;
};

}  // namespace pema::baselines
