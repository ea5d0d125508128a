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

#include "pema/sim/allocation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pema::sim {
namespace {

// Absorbs representation error in products such as 15 * 0.9.
constexpr double kRoundingSlack = 1e-9;

}  // namespace

int quantize_nearest(double cores) {
  return static_cast<int>(std::floor(cores * kQuantaPerCore + 0.5 + kRoundingSlack));
}

int quantize_up(double cores) {
  return static_cast<int>(std::ceil(cores * kQuantaPerCore - kRoundingSlack));
}

Allocation::Allocation(std::vector<int> quanta) : quanta_(std::move(quanta)) {
  for (int q : quanta_) {
    if (q < 0) throw std::invalid_argument("allocation entries must be non-negative");
  }
}

Allocation::Allocation(std::size_t services, int quanta_each)
    : Allocation(std::vector<int>(services, quanta_each)) {}

Allocation Allocation::from_cores(std::span<const double> cores) {
  std::vector<int> q;
  q.reserve(cores.size());
  for (double c : cores) q.push_back(quantize_nearest(c));
  return Allocation(std::move(q));
}

void Allocation::set_quanta(std::size_t i, int q) {
  if (q < 0) throw std::invalid_argument("allocation entries must be non-negative");
  quanta_.at(i) = q;
}

int Allocation::total_quanta() const {
  return std::accumulate(quanta_.begin(), quanta_.end(), 0);
}

std::vector<double> Allocation::to_cores() const {
  std::vector<double> out;
  out.reserve(quanta_.size());
  for (int q : quanta_) out.push_back(quanta_to_cores(q));
  return out;
}

bool Allocation::respects_floor(int floor_quanta) const {
  for (int q : quanta_) {
    if (q < floor_quanta) return false;
  }
  return true;
}

bool Allocation::dominated_by(const Allocation& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (quanta_[i] > other.quanta_[i]) return false;
  }
  return true;
}

}  // namespace pema::sim
