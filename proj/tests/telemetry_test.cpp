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

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "pema/telemetry/metrics_window.hpp"

namespace pema::telemetry {
namespace {

sim::MetricsSample sample(std::int64_t t, double r) {
  sim::MetricsSample s;
  s.t = t;
  s.r_ms = r;
  return s;
}

TEST(MetricsWindowTest, EvictsOldest) {
  MetricsWindow w(5);
  for (int t = 1; t <= 6; ++t) w.push(sample(t, 100.0 * t));
  EXPECT_EQ(w.size(), 5u);
  EXPECT_EQ(w.samples().front().t, 2);
  EXPECT_EQ(w.latest().t, 6);
}

TEST(MetricsWindowTest, PushOntoEmpty) {
  MetricsWindow w;
  EXPECT_TRUE(w.empty());
  w.push(sample(1, 10.0));
  EXPECT_EQ(w.size(), 1u);
}

TEST(MetricsWindowTest, RejectsStaleTime) {
  MetricsWindow w;
  w.push(sample(3, 10.0));
  EXPECT_THROW(w.push(sample(3, 10.0)), std::invalid_argument);
  EXPECT_THROW(w.push(sample(2, 10.0)), std::invalid_argument);
}

TEST(MetricsWindowTest, MovingAverage) {
  MetricsWindow w(5);
  w.push(sample(1, 250.0));
  EXPECT_DOUBLE_EQ(w.moving_avg_latency(), 250.0);
  MetricsWindow partial(5);
  partial.push(sample(1, 100.0));
  partial.push(sample(2, 200.0));
  EXPECT_DOUBLE_EQ(partial.moving_avg_latency(), 150.0);
  MetricsWindow full(5);
  for (int t = 1; t <= 5; ++t) full.push(sample(t, 100.0 * t));
  EXPECT_DOUBLE_EQ(full.moving_avg_latency(), 300.0);
}

TEST(MetricsWindowTest, EmptyWindowThrows) {
  MetricsWindow w;
  EXPECT_THROW(w.moving_avg_latency(), std::logic_error);
  EXPECT_THROW(w.latest(), std::logic_error);
}

TEST(MetricsWindowTest, LatestAmongThree) {
  MetricsWindow w;
  w.push(sample(1, 1.0));
  w.push(sample(4, 2.0));
  w.push(sample(9, 3.0));
  EXPECT_EQ(w.latest().t, 9);
  EXPECT_EQ(w.latest().r_ms, 3.0);
}

TEST(MetricsWindowPropertyTest, AverageIgnoresOrderAndLatestIsMaxT) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(1.0, 500.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    std::vector<double> values(k);
    for (auto& v : values) v = r(rng);
    std::vector<double> shuffled = values;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    MetricsWindow a(k);
    MetricsWindow b(k);
    for (std::size_t i = 0; i < k; ++i) {
      a.push(sample(static_cast<std::int64_t>(i + 1), values[i]));
      b.push(sample(static_cast<std::int64_t>(i + 1), shuffled[i]));
    }
    EXPECT_NEAR(a.moving_avg_latency(), b.moving_avg_latency(), 1e-9);
    EXPECT_EQ(a.latest().t, static_cast<std::int64_t>(k));
  }
}

}  // namespace
}  // namespace pema::telemetry
