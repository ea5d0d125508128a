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

#include "pema/workload/ranges.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pema::workload {

double dynamic_target(const WorkloadRange& range, double lambda, double r_slo_ms) {
  return range.slope_ms_per_rps * (lambda - range.hi) + r_slo_ms;
}

double learn_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("slope needs at least two points");
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
  }
  if (sxx <= 0.0) throw std::invalid_argument("slope needs at least two distinct workloads");
  return sxy / sxx;
}

RangeTree::RangeTree(double lo, double hi, std::size_t initial_ranges, double min_width)
    : lo_(lo), hi_(hi), min_width_(min_width) {
  if (!(hi > lo)) throw std::invalid_argument("workload bounds need lo < hi");
  if (initial_ranges == 0) throw std::invalid_argument("need at least one initial range");
  if (!(min_width > 0.0)) throw std::invalid_argument("minimum range width must be positive");
  const double width = (hi - lo) / static_cast<double>(initial_ranges);
  for (std::size_t k = 0; k < initial_ranges; ++k) {
    WorkloadRange range;
    range.lo = lo + width * static_cast<double>(k);
    range.hi = k + 1 == initial_ranges ? hi : lo + width * static_cast<double>(k + 1);
    range.controller_id = static_cast<int>(next_controller_++);
    nodes_.push_back(range);
  }
}

std::vector<int> RangeTree::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) { return node(a).lo < node(b).lo; });
  return out;
}

RangeTree::Route RangeTree::route(double lambda) const {
  const auto leaf_ids = leaves();
  if (lambda < lo_) return {leaf_ids.front(), true};
  if (lambda >= hi_) return {leaf_ids.back(), true};
  for (int id : leaf_ids) {
    if (node(id).contains(lambda)) return {id, false};
  }
  // Unreachable while leaves partition [lo, hi).
  throw std::logic_error("workload ranges do not cover the workload");
}

bool RangeTree::can_split(int id) const {
  const auto& range = node(id);
  return range.is_leaf() && range.width() / 2.0 >= min_width_;
}

std::optional<RangeTree::Split> RangeTree::split(int id) {
  if (!can_split(id)) return std::nullopt;
  const WorkloadRange parent = node(id);
  const double mid = parent.lo + parent.width() / 2.0;

  WorkloadRange lower;
  lower.lo = parent.lo;
  lower.hi = mid;
  lower.controller_id = static_cast<int>(next_controller_++);
  lower.slope_ms_per_rps = parent.slope_ms_per_rps;
  lower.parent = id;

  WorkloadRange upper;
  upper.lo = mid;
  upper.hi = parent.hi;
  upper.controller_id = parent.controller_id;
  upper.slope_ms_per_rps = parent.slope_ms_per_rps;
  upper.parent = id;

  const int lower_id = static_cast<int>(nodes_.size());
  nodes_.push_back(lower);
  nodes_.push_back(upper);
  nodes_[static_cast<std::size_t>(id)].children = {lower_id, lower_id + 1};
  return Split{lower_id, lower_id + 1, lower.controller_id};
}

void RangeTree::set_slope(int id, double slope_ms_per_rps) {
  nodes_.at(static_cast<std::size_t>(id)).slope_ms_per_rps = slope_ms_per_rps;
}

void RangeTree::set_all_slopes(double slope_ms_per_rps) {
  for (auto& n : nodes_) n.slope_ms_per_rps = slope_ms_per_rps;
}

std::string RangeTree::snapshot() const {
  std::string out;
  for (int id : leaves()) {
    if (!out.empty()) out += ' ';
    out += fmt::format("[{},{})#{}", node(id).lo, node(id).hi, node(id).controller_id);
  }
  return out;
}

bool should_split(const RangeTree& tree, int node, std::span<const double> recent_totals,
                  const SplitPolicy& policy) {
  if (!tree.can_split(node)) return false;
  if (policy.window == 0 || recent_totals.size() < policy.window) return false;
  const auto window = recent_totals.subspan(recent_totals.size() - policy.window);
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  if (*hi <= 0.0) return false;
  return (*hi - *lo) / *hi < policy.epsilon;
}

}  // namespace pema::workload
