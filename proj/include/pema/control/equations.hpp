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
#include <random>
#include <span>
#include <vector>

#include "pema/control/params.hpp"
#include "pema/sim/allocation.hpp"
#include "pema/sim/simulator.hpp"

// Per-interval decision rules of the controller, as pure functions.
namespace pema::control {

// min((target - r_eff) / (alpha * target), 1), or 0 when the gap is not
// positive. Shared by the count, cut and exploration rules.
double normalized_gap(double target_ms, double alpha, double r_eff_ms);

// Number of services to cut: round-half-up of n * gap, clamped to [0, n].
std::size_t target_count(double target_ms, double alpha, double r_eff_ms, std::size_t n);

// Fractional cut per selected service, in [0, beta].
double reduction_fraction(double target_ms, double alpha, double beta, double r_eff_ms);

// A * gap + B.
double exploration_probability(double target_ms, double alpha, double explore_a,
                               double explore_b, double r_eff_ms);

// Indices whose throttle time does not exceed their threshold (inclusive).
std::vector<std::size_t> throttle_filter(const sim::MetricsSample& sample,
                                         const ThresholdState& thresholds);

// Inclusion probabilities for `candidates`, aligned with it. Normalized
// utilization u/U_th is clamped to 1; the least loaded candidate gets 1, a
// candidate at its threshold gets 0, and all-equal inputs all get 1.
std::vector<double> selection_probabilities(const sim::MetricsSample& sample,
                                            const ThresholdState& thresholds,
                                            std::span<const std::size_t> candidates);

// Bernoulli inclusion with the given probabilities, then a uniform subset of
// size `count` if too many were included. Result is sorted.
std::vector<std::size_t> select_targets(std::span<const std::size_t> candidates,
                                        std::span<const double> probabilities, std::size_t count,
                                        std::mt19937_64& rng);

// x_i <- max(floor, round(x_i * (1 - delta))) for each target.
sim::Allocation apply_reduction(const sim::Allocation& x, std::span<const std::size_t> targets,
                                double delta, int floor_quanta);

// U_th <- max(U_th, u), H_th <- max(H_th, h).
ThresholdState update_thresholds(const ThresholdState& thresholds,
                                 const sim::MetricsSample& sample);

}  // namespace pema::control
