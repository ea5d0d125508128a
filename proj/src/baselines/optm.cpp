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

#include "pema/baselines/optm.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pema/sim/simulator.hpp"

namespace pema::baselines {

sim::Allocation ample_allocation(const sim::Scenario& scenario, double lambda,
                                 double utilization, int floor_quanta) {
  if (!(utilization > 0.0 && utilization <= 1.0)) {
    throw std::invalid_argument("ample utilization must be in (0, 1]");
  }
  std::vector<int> quanta;
  for (const auto& s : scenario.services()) {
    const double cores = lambda * s.visit_ratio * s.demand_s / utilization;
    quanta.push_back(std::max(floor_quanta, sim::quantize_up(cores)));
  }
  return sim::Allocation(std::move(quanta));
}

OptmResult optm_search(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                       const sim::Allocation& start, int floor_quanta) {
  OptmResult result;
  sim::Allocation x = start;
  double r = sim::noise_free_latency(scenario, x, lambda);
  result.evaluations = 1;
  if (r > r_slo_ms) {
    throw OptmError(fmt::format("starting allocation misses the target ({:.2f} ms > {:.2f} ms)",
                                r, r_slo_ms));
  }
  while (true) {
    std::size_t best = x.size();
    double best_r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x.quanta(i) <= floor_quanta) continue;
      sim::Allocation trial = x;
      trial.set_quanta(i, x.quanta(i) - 1);
      const double trial_r = sim::noise_free_latency(scenario, trial, lambda);
      ++result.evaluations;
      if (trial_r <= r_slo_ms && trial_r < best_r) {
        best = i;
        best_r = trial_r;
      }
    }
    if (best == x.size()) break;
    x.set_quanta(best, x.quanta(best) - 1);
    r = best_r;
  }
  result.total_cores = x.total_cores();
  result.r_ms = r;
  result.x_opt = std::move(x);
  return result;
}

OptmResult optm_search(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                       int floor_quanta) {
  return optm_search(scenario, lambda, r_slo_ms,
                     ample_allocation(scenario, lambda, 0.15, floor_quanta), floor_quanta);
}

bool is_optm_fixed_point(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                         const sim::Allocation& x, int floor_quanta) {
  if (sim::noise_free_latency(scenario, x, lambda) > r_slo_ms) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.quanta(i) <= floor_quanta) continue;
    sim::Allocation trial = x;
    trial.set_quanta(i, x.quanta(i) - 1);
    if (sim::noise_free_latency(scenario, trial, lambda) <= r_slo_ms) return false;
  }
  return true;
}

OptmCache::OptmCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path OptmCache::path_for(const sim::Scenario& scenario, double lambda,
                                          double r_slo_ms) const {
  return directory_ / fmt::format("optm-{:016x}-{}-{}.json", scenario.digest(), lambda, r_slo_ms);
}

std::optional<OptmResult> OptmCache::get(const sim::Scenario& scenario, double lambda,
                                         double r_slo_ms) const {
  std::ifstream in(path_for(scenario, lambda, r_slo_ms));
  if (!in) return std::nullopt;
  try {
    nlohmann::json doc = nlohmann::json::parse(in);
    OptmResult result;
    result.x_opt = sim::Allocation(doc.at("x_opt_quanta").get<std::vector<int>>());
    result.total_cores = result.x_opt.total_cores();
    result.evaluations = doc.at("evaluations").get<std::size_t>();
    result.r_ms = doc.at("r_ms").get<double>();
    if (result.x_opt.size() != scenario.size()) return std::nullopt;
    return result;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable cache entries are recomputed
  }
}

void OptmCache::put(const sim::Scenario& scenario, double lambda, double r_slo_ms,
                    const OptmResult& result) const {
  std::filesystem::create_directories(directory_);
  nlohmann::json doc = {{"scenario_digest", fmt::format("{:016x}", scenario.digest())},
                        {"lambda", lambda},
                        {"r_slo_ms", r_slo_ms},
                        {"x_opt_quanta", result.x_opt.raw()},
                        {"evaluations", result.evaluations},
                        {"r_ms", result.r_ms}};
  std::ofstream out(path_for(scenario, lambda, r_slo_ms), std::ios::trunc);
  out << doc.dump(2) << '\n';
}

OptmResult OptmCache::search(const sim::Scenario& scenario, double lambda,
                             double r_slo_ms) const {
  if (auto cached = get(scenario, lambda, r_slo_ms)) return *cached;
  OptmResult result = optm_search(scenario, lambda, r_slo_ms);
  put(scenario, lambda, r_slo_ms, result);
  return result;
}

}  // namespace pema::baselines
