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
#include <span>
#include <vector>

namespace pema::sim {

// Every allocation is a whole number of quanta; 0.1 core is the smallest
// step any allocator may take.
inline constexpr double kQuantumCores = 0.1;
inline constexpr int kQuantaPerCore = 10;

// Rounds a core count to the nearest quantum.
int quantize_nearest(double cores);
// Rounds a core count up to the next quantum.
int quantize_up(double cores);

inline constexpr double quanta_to_cores(int quanta) {
  return static_cast<double>(quanta) / kQuantaPerCore;
}

// Per-service CPU allocation vector. Stored in quanta so that equality,
// totals and on-disk round trips are exact.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::vector<int> quanta);
  Allocation(std::size_t services, int quanta_each);

  static Allocation from_cores(std::span<const double> cores);

  std::size_t size() const { return quanta_.size(); }
  bool empty() const { return quanta_.empty(); }

  int quanta(std::size_t i) const { return quanta_.at(i); }
  double cores(std::size_t i) const { return quanta_to_cores(quanta_.at(i)); }
  void set_quanta(std::size_t i, int q);

  int total_quanta() const;
  double total_cores() const { return quanta_to_cores(total_quanta()); }

  std::vector<double> to_cores() const;
  const std::vector<int>& raw() const { return quanta_; }

  // True when every entry is at least `floor_quanta`.
  bool respects_floor(int floor_quanta) const;
  // True when this allocation is componentwise <= `other`.
  bool dominated_by(const Allocation& other) const;

  bool operator==(const Allocation&) const = default;

 private:
  std::vector<int> quanta_;
};

}  // namespace pema::sim
