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

#include "pema/control/params.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace pema::control {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(fmt::format("invalid controller parameters: {}", what));
}

}  // namespace

void PemaParams::validate() const {
  require(r_slo_ms > 0.0, "r_slo_ms must be > 0");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(beta > 0.0 && beta <= 1.0, "beta must be in (0, 1]");
  require(explore_b >= 0.0 && explore_b <= explore_a && explore_a <= 1.0,
          "exploration bounds need 0 <= B <= A <= 1");
  require(explore_a + explore_b <= 1.0, "exploration bounds need A + B <= 1");
  require(window_k >= 1, "window_k must be >= 1");
  require(interval_s > 0.0, "interval_s must be > 0");
  require(floor_quanta >= 1, "floor must be at least one quantum");
  require(u_init > 0.0 && u_init <= 1.0, "u_init must be in (0, 1]");
  require(h_init >= 0.0, "h_init must be >= 0");
  require(buffer_fraction > 0.0 && buffer_fraction <= 1.0, "buffer_fraction must be in (0, 1]");
}

ThresholdState ThresholdState::initial(std::size_t services, const PemaParams& params) {
  return ThresholdState{std::vector<double>(services, params.u_init),
                        std::vector<double>(services, params.h_init)};
}

}  // namespace pema::control
