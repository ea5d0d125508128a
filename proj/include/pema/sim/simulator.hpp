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
#include <span>
#include <vector>

#include "pema/sim/allocation.hpp"
#include "pema/sim/scenario.hpp"

namespace pema::sim {

// Offered load is capped at this value inside the latency model.
inline constexpr double kSaturationLoad = 0.99;
inline constexpr double kDefaultIntervalSeconds = 120.0;

// One interval's observation of the whole mesh.
struct MetricsSample {
  std::int64_t t = 0;
  double r_ms = 0.0;            // p95 end-to-end latency
  std::vector<double> u;        // utilization relative to allocation, [0, 1]
  std::vector<double> h;        // throttled seconds during the interval
  double lambda = 0.0;          // requests per second
};

// rho_i = lambda * v_i * d_i / x_i, not clamped.
double per_service_load(const ServiceSpec& spec, double cores, double lambda);

// b_i + 1000 d_i / (1 - min(rho, 0.99)).
double per_service_latency(const ServiceSpec& spec, double load);

// kappa * max(0, rho - knee) * interval, clamped to the interval length.
double per_service_throttle(const ServiceSpec& spec, double load,
                            double interval_s);

// Critical-path aggregation from the root: own latency plus the sum of
// sequential groups plus the max of each parallel group.
double end_to_end_latency(const Scenario& scenario,
                          std::span<const double> per_service_ms);

// Mean-one lognormal factor exp(sigma z - sigma^2 / 2) where z is drawn from a
// stream keyed only by (seed, t).
double noise_factor(double sigma, std::uint64_t seed, std::int64_t t);

// Simulates one interval. Deterministic in (scenario, x, lambda, t).
MetricsSample step(const Scenario& scenario, const Allocation& x,
                   double lambda, std::int64_t t,
                   double interval_s = kDefaultIntervalSeconds);

// Noise-free end-to-end latency; what the optimum search evaluates.
double noise_free_latency(const Scenario& scenario, const Allocation& x,
                          double lambda);

}  // namespace pema::sim
