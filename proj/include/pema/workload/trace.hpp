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
#include <filesystem>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace pema::workload {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TracePoint {
  double timestamp_s = 0.0;
  double rps = 0.0;
};

// Workload trace: non-decreasing timestamps, non-negative rates.
class Trace {
 public:
  explicit Trace(std::vector<TracePoint> points);

  // Two columns per line (epoch seconds, requests per second), separated by a
  // comma or whitespace. Blank lines and lines starting with '#' are skipped,
  // as is a leading non-numeric header line.
  static Trace parse(std::string_view text);
  static Trace load(const std::filesystem::path& path);

  const std::vector<TracePoint>& points() const { return points_; }
  double max_rps() const;
  double min_rps() const;

 private:
  std::vector<TracePoint> points_;
};

// Piecewise-constant workload per controller interval: interval k takes the
// value of the last point at or before its start time. With `steps == 0` the
// replay covers the trace span; otherwise the last value is held as needed.
std::vector<double> replay(const Trace& trace, double interval_s, std::size_t steps = 0);

}  // namespace pema::workload
