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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pema::workload {

// Half-open workload interval [lo, hi) owning one controller.
struct WorkloadRange {
  double lo = 0.0;
  double hi = 0.0;
  int controller_id = 0;
  double slope_ms_per_rps = 0.0;
  int parent = -1;
  std::array<int, 2> children{-1, -1};  // lower, upper

  bool is_leaf() const { return children[0] < 0; }
  double width() const { return hi - lo; }
  bool contains(double lambda) const { return lambda >= lo && lambda < hi; }
};

// R(lambda) = m (lambda - hi) + R_slo. Equals R_slo at the upper bound.
double dynamic_target(const WorkloadRange& range, double lambda, double r_slo_ms);

// Ordinary least-squares slope of latency on workload over (lambda, r_ms)
// points. Throws std::invalid_argument when fewer than two distinct
// workloads are present.
double learn_slope(std::span<const std::pair<double, double>> points);

// Forest of binary range trees. The initial ranges split [lo, hi) evenly and
// get controllers 0..k-1; every split hands the parent's controller to the
// upper child and allocates a fresh id for the lower child.
class RangeTree {
 public:
  RangeTree(double lo, double hi, std::size_t initial_ranges = 1, double min_width = 25.0);

  struct Route {
    int node = -1;
    bool clamped = false;  // lambda fell outside [lo, hi)
  };

  struct Split {
    int lower = -1;
    int upper = -1;
    int new_controller = -1;
  };

  Route route(double lambda) const;
  // Leaf whose halves would both be at least min_width wide.
  bool can_split(int node) const;
  // Splits a leaf at its midpoint; std::nullopt (no change) otherwise.
  std::optional<Split> split(int node);

  const WorkloadRange& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<WorkloadRange>& nodes() const { return nodes_; }
  // Leaf ids ordered by lower bound.
  std::vector<int> leaves() const;
  std::size_t controller_count() const { return next_controller_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double min_width() const { return min_width_; }

  void set_slope(int node, double slope_ms_per_rps);
  void set_all_slopes(double slope_ms_per_rps);

  // "[200,300)#1 [300,400)#0": leaves and their controller ids.
  std::string snapshot() const;

 private:
  std::vector<WorkloadRange> nodes_;
  double lo_;
  double hi_;
  double min_width_;
  std::size_t next_controller_ = 0;
};

struct SplitPolicy {
  double epsilon = 0.02;   // relative spread of recent totals
  std::size_t window = 10; // intervals spent in the range
};

// True when the range can split and the controller's total allocation over the
// last `policy.window` intervals in this range varied by less than epsilon
// relative to its maximum.
bool should_split(const RangeTree& tree, int node, std::span<const double> recent_totals,
                  const SplitPolicy& policy);

}  // namespace pema::workload
