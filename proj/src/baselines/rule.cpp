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

#include "pema/baselines/rule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pema::baselines {

double percentile_nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile must be in (0, 1]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<double> usage_cores(const sim::MetricsSample& sample, const sim::Allocation& applied) {
  std::vector<double> out(applied.size());
  for (std::size_t i = 0; i < applied.size(); ++i) out[i] = sample.u.at(i) * applied.cores(i);
  return out;
}

std::vector<double> rule_target_cores(std::span<const std::vector<double>> usage_history,
                                      const RuleParams& params) {
  if (usage_history.empty()) throw std::invalid_argument("RULE needs at least one sample");
  const std::size_t take = std::min(params.lookback, usage_history.size());
  const auto recent = usage_history.subspan(usage_history.size() - take);
  const std::size_t services = recent.front().size();
  std::vector<double> out(services);
  for (std::size_t i = 0; i < services; ++i) {
    std::vector<double> column;
    column.reserve(recent.size());
    for (const auto& row : recent) column.push_back(row.at(i));
    out[i] = params.overprovision * percentile_nearest_rank(std::move(column), params.percentile);
  }
  return out;
}

sim::Allocation rule_step(std::span<const std::vector<double>> usage_history,
                          const RuleParams& params) {
  std::vector<int> quanta;
  for (double cores : rule_target_cores(usage_history, params)) {
    quanta.push_back(std::max(params.floor_quanta, sim::quantize_up(cores)));
  }
  return sim::Allocation(std::move(quanta));
}

RuleAutoscaler::RuleAutoscaler(RuleParams params, sim::Allocation initial)
    : params_(params), x_(std::move(initial)) {
  if (params_.lookback == 0) throw std::invalid_argument("RULE lookback must be positive");
}

sim::Allocation RuleAutoscaler::observe(const sim::MetricsSample& sample) {
  history_.push_back(usage_cores(sample, x_));
  while (history_.size() > params_.lookback) history_.pop_front();
  const std::vector<std::vector<double>> rows(history_.begin(), history_.end());
  x_ = rule_step(rows, params_);
  return x_;
}

}  // namespace pema::baselines
