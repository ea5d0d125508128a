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

#include <filesystem>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "pema/baselines/optm.hpp"
#include "pema/baselines/rule.hpp"
#include "pema/sim/simulator.hpp"

namespace pema::baselines {
namespace {

sim::Scenario single(double demand) {
  sim::ServiceSpec s;
  s.name = "only";
  s.demand_s = demand;
  s.base_latency_ms = 2.0;
  return sim::Scenario({s}, {}, 0, 0.0);
}

TEST(OptmTest, SingleServiceMatchesScan) {
  for (double demand : {0.005, 0.01, 0.02}) {
    const auto s = single(demand);
    for (double r_slo : {30.0, 60.0, 120.0}) {
      const auto result = optm_search(s, 100.0, r_slo);
      const auto expected = testing::scan_single(s, 100.0, r_slo, 1000);
      ASSERT_TRUE(expected.has_value());
      EXPECT_EQ(result.x_opt.quanta(0), *expected) << demand << " " << r_slo;
      EXPECT_LE(result.r_ms, r_slo);
    }
  }
}

TEST(OptmTest, ResultIsFixedPoint) {
  const auto s = sim::load_scenario(PEMA_SOURCE_DIR "/scenarios/reference5.json");
  const auto result = optm_search(s.with_noise(0.0), 200.0, 120.0);
  EXPECT_TRUE(is_optm_fixed_point(s.with_noise(0.0), 200.0, 120.0, result.x_opt));
  EXPECT_DOUBLE_EQ(result.total_cores, result.x_opt.total_cores());
  EXPECT_GT(result.evaluations, 0u);
}

TEST(OptmTest, InfeasibleStartThrows) {
  const auto s = single(0.01);
  EXPECT_THROW(optm_search(s, 100.0, 30.0, sim::Allocation(std::vector<int>{11}), 1), OptmError);
}

TEST(OptmTest, TwoServiceMatchesGrid) {
  testing::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_scenario(rng, 2, 2);
    const double lambda = testing::uniform(rng, 50, 150);
    const auto start = baselines::ample_allocation(s, lambda, 0.15);
    if (start.quanta(0) > 40 || start.quanta(1) > 40) continue;
    const double r_slo = sim::noise_free_latency(s, start, lambda) * testing::uniform(rng, 1.3, 4);
    const auto greedy = optm_search(s, lambda, r_slo, start, 1);
    const auto grid = testing::grid_search_two(s, lambda, r_slo, 40);
    ASSERT_TRUE(grid.has_value());
    EXPECT_LE(greedy.x_opt.total_quanta() - grid->total_quanta, 2);
    EXPECT_TRUE(is_optm_fixed_point(s, lambda, r_slo, greedy.x_opt));
  }
}

TEST(OptmCacheTest, StoresAndReloads) {
  const auto dir = std::filesystem::temp_directory_path() / "pema_optm_cache_test";
  std::filesystem::remove_all(dir);
  const OptmCache cache(dir);
  const auto s = single(0.01);
  EXPECT_FALSE(cache.get(s, 100.0, 60.0).has_value());
  const auto first = cache.search(s, 100.0, 60.0);
  const auto again = cache.get(s, 100.0, 60.0);
  ASSERT_TRUE(again.has_value());
  EXPECT_EQ(again->x_opt, first.x_opt);
  EXPECT_EQ(again->evaluations, first.evaluations);
  EXPECT_FALSE(cache.get(s, 100.0, 61.0).has_value());
  std::filesystem::remove_all(dir);
}

TEST(RuleTest, PercentileNearestRank) {
  EXPECT_EQ(percentile_nearest_rank({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9), 9);
  EXPECT_EQ(percentile_nearest_rank({5}, 0.9), 5);
  EXPECT_EQ(percentile_nearest_rank({3, 1, 2}, 0.5), 2);
}

TEST(RuleTest, ConstantUsage) {
  const std::vector<std::vector<double>> h(10, std::vector<double>{1.0});
  EXPECT_EQ(rule_step(h, RuleParams{}).quanta(0), 12);
}

TEST(RuleTest, SpikeFallsOutsideNinetiethPercentile) {
  std::vector<std::vector<double>> h(9, std::vector<double>{0.5});
  h.push_back({2.0});
  // Nearest rank: ceil(0.9 * 10) = 9th smallest = 0.5, so 0.575 rounds up.
  EXPECT_EQ(rule_step(h, RuleParams{}).quanta(0), 6);
}

TEST(RuleTest, ZeroUsageGivesFloor) {
  const std::vector<std::vector<double>> h(3, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(rule_step(h, RuleParams{}), sim::Allocation(2, 1));
}

TEST(RuleTest, EmptyHistoryThrows) {
  EXPECT_THROW(rule_step(std::vector<std::vector<double>>{}, RuleParams{}), std::invalid_argument);
}

TEST(RuleTest, OnlyLookbackRowsCount) {
  std::vector<std::vector<double>> h(5, std::vector<double>{4.0});
  for (int i = 0; i < 10; ++i) h.push_back({1.0});
  EXPECT_EQ(rule_step(h, RuleParams{}).quanta(0), 12);
}

TEST(RulePropertyTest, ScaleEquivariantAndFloored) {
  testing::Rng rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = testing::uniform_index(rng, 1, 6);
    std::vector<std::vector<double>> h(testing::uniform_index(rng, 1, 15), std::vector<double>(n));
    for (auto& row : h) {
      for (auto& v : row) v = testing::uniform(rng, 0.0, 3.0);
    }
    const double c = testing::uniform(rng, 0.1, 5.0);
    auto scaled = h;
    for (auto& row : scaled) {
      for (auto& v : row) v *= c;
    }
    const auto base = rule_target_cores(h, RuleParams{});
    const auto big = rule_target_cores(scaled, RuleParams{});
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(big[i], c * base[i], 1e-9);
    EXPECT_TRUE(rule_step(h, RuleParams{}).respects_floor(1));
  }
}

TEST(RuleAutoscalerTest, TracksUsage) {
  RuleAutoscaler rule(RuleParams{}, sim::Allocation(std::vector<int>{20}));
  sim::MetricsSample s;
  s.t = 1;
  s.u = {0.5};
  s.h = {0.0};
  EXPECT_EQ(rule.observe(s).quanta(0), 12);
  EXPECT_EQ(rule.allocation().quanta(0), 12);
}

}  // namespace
}  // namespace pema::baselines
