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
#include <deque>

#include "pema/sim/simulator.hpp"

namespace pema::telemetry {

inline constexpr std::size_t kDefaultWindow = 5;

// Bounded, time-ordered ring of the most recent samples. Reduction sizing
// reads the moving average; violation detection must read `latest()`.
class MetricsWindow {
 public:
  explicit MetricsWindow(std::size_t capacity = kDefaultWindow);

  // Throws std::invalid_argument unless sample.t is newer than every stored t.
  void push(sim::MetricsSample sample);

  // Mean of the stored latencies; averages whatever is present while the
  // window is still filling. Throws std::logic_error when empty.
  double moving_avg_latency() const;
  const sim::MetricsSample& latest() const;

  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }
  const std::deque<sim::MetricsSample>& samples() const { return samples_; }

 private:
  std::size_t capacity_;
  std::deque<sim::MetricsSample> samples_;
};

}  // namespace pema::telemetry
