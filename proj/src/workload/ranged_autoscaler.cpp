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

#include "pema/workload/ranged_autoscaler.hpp"

#include <algorithm>
#include <limits>

namespace pema::workload {

RangedAutoscaler::RangedAutoscaler(control::PemaParams params, sim::Allocation initial,
                                   RangedConfig config, std::uint64_t seed)
    : config_(config),
      tree_(config.lo, config.hi, config.initial_ranges,
            config.splitting ? config.min_width : std::numeric_limits<double>::infinity()),
      r_slo_ms_(params.r_slo_ms),
      seed_(seed) {
  tree_.set_all_slopes(config.slope_ms_per_rps);
  for (std::size_t id = 0; id < tree_.controller_count(); ++id) {
    controllers_.emplace_back(params, initial, seed_for(static_cast<int>(id)));
  }
}

std::uint64_t RangedAutoscaler::seed_for(int controller_id) const {
  return seed_ + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(controller_id + 1);
}

RangedAutoscaler::Active RangedAutoscaler::activate(double lambda) const {
  const auto route = tree_.route(lambda);
  const auto& range = tree_.node(route.node);
  Active active;
  active.node = route.node;
  active.controller = range.controller_id;
  active.clamped = route.clamped;
  const double clamped_lambda = std::clamp(lambda, range.lo, range.hi);
  active.target_ms = dynamic_target(range, clamped_lambda, r_slo_ms_);
  return active;
}

const sim::Allocation& RangedAutoscaler::allocation_for(double lambda) const {
  return controller(activate(lambda).controller).allocation();
}

void RangedAutoscaler::set_r_slo(double r_slo_ms) {
  for (auto& c : controllers_) c.set_r_slo(r_slo_ms);
  r_slo_ms_ = r_slo_ms;
}

RangedAutoscaler::StepResult RangedAutoscaler::step(const sim::MetricsSample& sample) {
  StepResult result;
  result.active = activate(sample.lambda);
  auto& controller = controllers_.at(static_cast<std::size_t>(result.active.controller));
  result.decision = controller.step(sample, result.active.target_ms);

  auto& totals = totals_by_node_[result.active.node];
  totals.push_back(result.decision.next.total_cores());
  while (totals.size() > std::max<std::size_t>(config_.split.window, 1)) totals.pop_front();

  const std::vector<double> recent(totals.begin(), totals.end());
  if (should_split(tree_, result.active.node, recent, config_.split)) {
    result.split = tree_.split(result.active.node);
    if (result.split) {
      const auto& parent = controllers_.at(static_cast<std::size_t>(result.active.controller));
      control::PemaController child(parent.params(), parent.allocation(), parent.thresholds(),
                                    seed_for(result.split->new_controller));
      controllers_.push_back(std::move(child));
      totals_by_node_.erase(result.active.node);
    }
  }
  return result;
}

}  // namespace pema::workload
