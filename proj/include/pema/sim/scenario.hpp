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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pema::sim {

// Lognormal sigma used when a scenario file does not set one. Calibrated so
// that roughly one in ten random monotonic reductions shows a latency drop.
inline constexpr double kDefaultNoiseSigma = 0.03;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServiceSpec {
  std::string name;
  double demand_s = 0.01;         // CPU-seconds per request
  double base_latency_ms = 1.0;   // fixed per-hop latency
  double visit_ratio = 1.0;       // requests per end-to-end request
  double throttle_knee = 0.8;     // offered load where throttling starts
  double throttle_gain = 1.0;     // throttle seconds per unit excess load per second
};

enum class CallMode { kSequential, kParallel };

std::string_view to_string(CallMode mode);
CallMode call_mode_from_string(std::string_view text);

// One group of downstream calls made by `parent`. Sequential groups add
// their children's latencies, parallel groups take the maximum.
struct CallGroup {
  std::size_t parent = 0;
  std::vector<std::size_t> children;
  CallMode mode = CallMode::kSequential;
};

// A validated microservice mesh. Construction rejects cycles, unreachable
// services and non-positive parameters, so everything downstream can assume
// a well-formed DAG rooted at `root()`.
class Scenario {
 public:
  Scenario(std::vector<ServiceSpec> services, std::vector<CallGroup> calls,
           std::size_t root, double noise_sigma = kDefaultNoiseSigma,
           std::uint64_t rng_seed = 0);

  std::size_t size() const { return services_.size(); }
  const std::vector<ServiceSpec>& services() const { return services_; }
  const ServiceSpec& service(std::size_t i) const { return services_.at(i); }
  const std::vector<CallGroup>& calls() const { return calls_; }
  // Call groups issued by service `i`, in declaration order.
  const std::vector<std::size_t>& groups_of(std::size_t i) const {
    return groups_by_parent_.at(i);
  }
  // Services ordered so that every child precedes its parents.
  const std::vector<std::size_t>& bottom_up_order() const { return bottom_up_; }

  std::size_t root() const { return root_; }
  double noise_sigma() const { return noise_sigma_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  std::size_t index_of(std::string_view name) const;

  Scenario with_noise(double sigma) const;
  Scenario with_seed(std::uint64_t seed) const;
  // Multiplies every service demand; emulates a CPU speed change.
  Scenario with_demand_scale(double factor) const;

  // Stable 64-bit FNV-1a digest of the canonical JSON form.
  std::uint64_t digest() const;

 private:
  void validate_and_index();

  std::vector<ServiceSpec> services_;
  std::vector<CallGroup> calls_;
  std::vector<std::vector<std::size_t>> groups_by_parent_;
  std::vector<std::size_t> bottom_up_;
  std::size_t root_ = 0;
  double noise_sigma_ = kDefaultNoiseSigma;
  std::uint64_t rng_seed_ = 0;
};

// Scenario documents are JSON objects with keys `services`, `edges`, `root`,
// `noise_sigma` and `seed`. Unknown keys are rejected.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

}  // namespace pema::sim
