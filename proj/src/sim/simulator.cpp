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

#include "pema/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pema::sim {

double per_service_load(const ServiceSpec& spec, double cores, double lambda) {
  return lambda * spec.visit_ratio * spec.demand_s / cores;
}

double per_service_latency(const ServiceSpec& spec, double load) {
  const double capped = std::min(load, kSaturationLoad);
  return spec.base_latency_ms + 1000.0 * spec.demand_s / (1.0 - capped);
}

double per_service_throttle(const ServiceSpec& spec, double load, double interval_s) {
  const double excess = std::max(0.0, load - spec.throttle_knee);
  return std::min(spec.throttle_gain * excess * interval_s, interval_s);
}

double end_to_end_latency(const Scenario& scenario, std::span<const double> per_service_ms) {
  if (per_service_ms.size() != scenario.size()) {
    throw std::invalid_argument("per-service latency vector has the wrong length");
  }
  std::vector<double> subtree(scenario.size(), 0.0);
  for (std::size_t node : scenario.bottom_up_order()) {
    double value = per_service_ms[node];
    for (std::size_t g : scenario.groups_of(node)) {
      const CallGroup& group = scenario.calls()[g];
      double group_value = 0.0;
      for (std::size_t child : group.children) {
        group_value = group.mode == CallMode::kSequential ? group_value + subtree[child]
                                                          : std::max(group_value, subtree[child]);
      }
      value += group_value;
    }
    subtree[node] = value;
  }
  return subtree[scenario.root()];
}

double noise_factor(double sigma, std::uint64_t seed, std::int64_t t) {
  if (sigma == 0.0) return 1.0;
  const auto ut = static_cast<std::uint64_t>(t);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(ut), static_cast<std::uint32_t>(ut >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(rng);
  return std::exp(sigma * z - 0.5 * sigma * sigma);
}

namespace {

std::vector<double> per_service_latencies(const Scenario& scenario, const Allocation& x,
                                          double lambda, std::vector<double>* loads) {
  if (x.size() != scenario.size()) {
    throw std::invalid_argument("allocation size does not match the scenario");
  }
  std::vector<double> latency(scenario.size());
  if (loads != nullptr) loads->resize(scenario.size());
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    const double cores = x.cores(i);
    if (!(cores > 0.0)) throw std::invalid_argument("allocation entries must be positive");
    const double load = per_service_load(scenario.service(i), cores, lambda);
    latency[i] = per_service_latency(scenario.service(i), load);
    if (loads != nullptr) (*loads)[i] = load;
  }
  return latency;
}

}  // namespace

MetricsSample step(const Scenario& scenario, const Allocation& x, double lambda, std::int64_t t,
                   double interval_s) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("workload must be >= 0");
  std::vector<double> loads;
  const std::vector<double> latency = per_service_latencies(scenario, x, lambda, &loads);

  MetricsSample sample;
  sample.t = t;
  sample.lambda = lambda;
  sample.u.resize(scenario.size());
  sample.h.resize(scenario.size());
  for (std::size_t i = 0; i < scenario.size(); ++i) {
    sample.u[i] = std::min(loads[i], 1.0);
    sample.h[i] = per_service_throttle(scenario.service(i), loads[i], interval_s);
  }
  sample.r_ms = end_to_end_latency(scenario, latency) *
                noise_factor(scenario.noise_sigma(), scenario.rng_seed(), t);
  return sample;
}

double noise_free_latency(const Scenario& scenario, const Allocation& x, double lambda) {
  return end_to_end_latency(scenario, per_service_latencies(scenario, x, lambda, nullptr));
}

}  // namespace pema::sim
