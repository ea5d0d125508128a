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

#include "pema/control/equations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pema::control {

double normalized_gap(double target_ms, double alpha, double r_eff_ms) {
  const double gap = target_ms - r_eff_ms;
  if (!(gap > 0.0)) return 0.0;
  return std::min(gap / (alpha * target_ms), 1.0);
}

std::size_t target_count(double target_ms, double alpha, double r_eff_ms, std::size_t n) {
  const double raw = static_cast<double>(n) * normalized_gap(target_ms, alpha, r_eff_ms);
  const auto rounded = static_cast<std::size_t>(std::floor(raw + 0.5));
  return std::min(rounded, n);
}

double reduction_fraction(double target_ms, double alpha, double beta, double r_eff_ms) {
  return beta * normalized_gap(target_ms, alpha, r_eff_ms);
}

double exploration_probability(double target_ms, double alpha, double explore_a,
                               double explore_b, double r_eff_ms) {
  return explore_a * normalized_gap(target_ms, alpha, r_eff_ms) + explore_b;
}

std::vector<std::size_t> throttle_filter(const sim::MetricsSample& sample,
                                         const ThresholdState& thresholds) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sample.h.size(); ++i) {
    if (sample.h[i] <= thresholds.h_th.at(i)) out.push_back(i);
  }
  return out;
}

std::vector<double> selection_probabilities(const sim::MetricsSample& sample,
                                            const ThresholdState& thresholds,
                                            std::span<const std::size_t> candidates) {
  std::vector<double> normalized;
  normalized.reserve(candidates.size());
  for (std::size_t i : candidates) {
    normalized.push_back(std::min(sample.u.at(i) / thresholds.u_th.at(i), 1.0));
  }
  if (normalized.empty()) return {};
  const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
  const double min_u = *lo;
  if (*hi - min_u <= 1e-12) return std::vector<double>(normalized.size(), 1.0);

  std::vector<double> p;
  p.reserve(normalized.size());
  for (double u : normalized) p.push_back(1.0 - (u - min_u) / (1.0 - min_u));
  return p;
}

std::vector<std::size_t> select_targets(std::span<const std::size_t> candidates,
                                        std::span<const double> probabilities, std::size_t count,
                                        std::mt19937_64& rng) {
  if (candidates.size() != probabilities.size()) {
    throw std::invalid_argument("one probability per candidate required");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> included;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (unit(rng) < probabilities[k]) included.push_back(candidates[k]);
  }
  if (included.size() > count) {
    std::shuffle(included.begin(), included.end(), rng);
    included.resize(count);
  }
  std::sort(included.begin(), included.end());
  return included;
}

sim::Allocation apply_reduction(const sim::Allocation& x, std::span<const std::size_t> targets,
                                double delta, int floor_quanta) {
  sim::Allocation next = x;
  for (std::size_t i : targets) {
    const int current = x.quanta(i);
    const int reduced = sim::quantize_nearest(x.cores(i) * (1.0 - delta));
    // Never raise an allocation that already sits below the floor.
    next.set_quanta(i, std::min(current, std::max(floor_quanta, reduced)));
  }
  return next;
}

ThresholdState update_thresholds(const ThresholdState& thresholds,
                                 const sim::MetricsSample& sample) {
  ThresholdState next = thresholds;
  for (std::size_t i = 0; i < next.u_th.size(); ++i) {
    next.u_th[i] = std::max(next.u_th[i], sample.u.at(i));
    next.h_th[i] = std::max(next.h_th[i], sample.h.at(i));
  }
  return next;
}

}  // namespace pema::control
