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

#include "pema/control/controller.hpp"

#include <stdexcept>

#include "pema/control/equations.hpp"

namespace pema::control {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::kReduce:
      return "reduce";
    case Action::kHold:
      return "hold";
    case Action::kRollback:
      return "rollback";
    case Action::kExplore:
      return "explore";
  }
  return "unknown";
}

PemaController::PemaController(PemaParams params, sim::Allocation initial, std::uint64_t seed)
    : PemaController(params, initial, ThresholdState::initial(initial.size(), params), seed) {}

PemaController::PemaController(PemaParams params, sim::Allocation initial,
                               ThresholdState thresholds, std::uint64_t seed)
    : params_(params),
      initial_(initial),
      x_(std::move(initial)),
      thresholds_(std::move(thresholds)),
      window_(params.window_k),
      history_(x_.size()),
      rng_(seed) {
  params_.validate();
  if (x_.empty()) throw std::invalid_argument("controller needs at least one service");
  if (!x_.respects_floor(params_.floor_quanta)) {
    throw std::invalid_argument("initial allocation is below the floor");
  }
  if (thresholds_.u_th.size() != x_.size() || thresholds_.h_th.size() != x_.size()) {
    throw std::invalid_argument("threshold state does not match the allocation");
  }
}

void PemaController::set_r_slo(double r_slo_ms) {
  PemaParams next = params_;
  next.r_slo_ms = r_slo_ms;
  next.validate();
  params_ = next;
}

rhdb::Eligibility PemaController::eligibility() const {
  return params_.skip_superseded_history ? rhdb::Eligibility::kExcludeSuperseded
                                         : rhdb::Eligibility::kRecordedFlag;
}

Decision PemaController::step(const sim::MetricsSample& sample, double target_ms) {
  if (sample.u.size() != x_.size() || sample.h.size() != x_.size()) {
    throw std::invalid_argument("sample does not match the controlled services");
  }
  if (!(target_ms > 0.0)) throw std::invalid_argument("latency target must be > 0");

  window_.push(sample);
  const bool violated = sample.r_ms > target_ms;
  history_.insert(rhdb::Entry{sample.t, sample.lambda, sample.r_ms, violated, x_,
                              thresholds_.u_th, thresholds_.h_th});

  Decision d;
  d.target_ms = target_ms;
  d.r_eff_ms = window_.moving_avg_latency();

  if (violated) {
    const auto entry = history_.min_resource_non_violating(eligibility());
    d.next = entry ? entry->x : initial_;
    d.action = Action::kRollback;
    x_ = d.next;
    return d;
  }

  thresholds_ = update_thresholds(thresholds_, sample);

  d.explore_p = exploration_probability(target_ms, params_.alpha, params_.explore_a,
                                        params_.explore_b, d.r_eff_ms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng_) < d.explore_p) {
    if (const auto entry = history_.random_non_violating(rng_, eligibility())) {
      d.next = entry->x;
      d.action = Action::kExplore;
      x_ = d.next;
      return d;
    }
  }

  const double sizing_target = target_ms * params_.buffer_fraction;
  d.count = target_count(sizing_target, params_.alpha, d.r_eff_ms, x_.size());
  d.delta = reduction_fraction(sizing_target, params_.alpha, params_.beta, d.r_eff_ms);
  d.next = x_;
  d.action = Action::kHold;
  if (d.count == 0 || d.delta <= 0.0) return d;

  const auto candidates = throttle_filter(sample, thresholds_);
  if (candidates.empty()) return d;
  const auto probabilities = selection_probabilities(sample, thresholds_, candidates);
  d.targets = select_targets(candidates, probabilities, d.count, rng_);
  if (d.targets.empty()) return d;

  d.next = apply_reduction(x_, d.targets, d.delta, params_.floor_quanta);
  d.action = Action::kReduce;
  x_ = d.next;
  return d;
}

}  // namespace pema::control
