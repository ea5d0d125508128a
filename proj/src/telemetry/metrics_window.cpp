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

#include "pema/telemetry/metrics_window.hpp"

#include <stdexcept>

namespace pema::telemetry {

MetricsWindow::MetricsWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("window capacity must be positive");
}

void MetricsWindow::push(sim::MetricsSample sample) {
  if (!samples_.empty() && sample.t <= samples_.back().t) {
    throw std::invalid_argument("sample time must be strictly increasing");
  }
  samples_.push_back(std::move(sample));
  while (samples_.size() > capacity_) samples_.pop_front();
}

double MetricsWindow::moving_avg_latency() const {
  if (samples_.empty()) throw std::logic_error("moving average of an empty window");
  double sum = 0.0;
  for (const auto& s : samples_) sum += s.r_ms;
  return sum / static_cast<double>(samples_.size());
}

const sim::MetricsSample& MetricsWindow::latest() const {
  if (samples_.empty()) throw std::logic_error("latest sample of an empty window");
  return samples_.back();
}

}  // namespace pema::telemetry
