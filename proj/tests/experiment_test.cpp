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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pema/experiment/config.hpp"
#include "pema/experiment/report.hpp"
#include "pema/experiment/runner.hpp"
#include "pema/rhdb/rhdb.hpp"

namespace pema::experiment {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pema_experiment_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExperimentConfig reference(const std::string& allocator, const std::string& out) {
    ExperimentConfig c = parse_config(
        R"({"scenario": "scenarios/reference5.json", "workload": {"constant_rps": 200},
            "allocator": ")" + allocator + R"(", "pema": {"r_slo_ms": 120}, "steps": 60})",
        PEMA_SOURCE_DIR);
    c.output_dir = dir_ / out;
    return c;
  }

  fs::path dir_;
};

TEST_F(ExperimentTest, ConfigRejectsUnknownKeysAndBadWorkload) {
  EXPECT_THROW(parse_config(R"({"scenario":"s.json","workload":{"constant_rps":1},"speed":3})", "."),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario":"s.json","workload":{}})", "."), ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario":"s.json","workload":{"constant_rps":1,"trace":"t"}})", "."),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario":"s.json","workload":{"constant_rps":1},"allocator":"hpa"})", "."),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"scenario":"s.json","workload":{"constant_rps":1},
                               "pema":{"alpha":0}})", "."),
               ConfigError);
  EXPECT_THROW(parse_config("[1,2", "."), ConfigError);
  EXPECT_THROW(load_config(dir_ / "missing.json"), ConfigError);
}

TEST_F(ExperimentTest, ConfigResolvesPathsAgainstItsDirectory) {
  const auto c = parse_config(
      R"({"scenario":"s.json","workload":{"trace":"t.csv"},"optm_cache_dir":"cache",
          "events":[{"step":5,"demand_scale":1.1},{"step":9,"r_slo_ms":60}]})",
      "/base");
  EXPECT_EQ(c.scenario_path, fs::path("/base/s.json"));
  EXPECT_EQ(*c.trace_path, fs::path("/base/t.csv"));
  EXPECT_EQ(*c.optm_cache_dir, fs::path("/base/cache"));
  ASSERT_EQ(c.events.size(), 2u);
  EXPECT_EQ(*c.events[0].demand_scale, 1.1);
  EXPECT_EQ(*c.events[1].r_slo_ms, 60);
}

TEST_F(ExperimentTest, PemaRunIsByteIdenticalAcrossInvocations) {
  const auto a = reference("pema", "a");
  const auto b = reference("pema", "b");
  run(a);
  run(b);
  EXPECT_EQ(slurp(a.output_dir / "intervals.csv"), slurp(b.output_dir / "intervals.csv"));
  EXPECT_EQ(slurp(a.output_dir / "summary.csv"), slurp(b.output_dir / "summary.csv"));
}

TEST_F(ExperimentTest, IntervalRowsMatchStepsAndViolationFlag) {
  const auto c = reference("pema", "rows");
  const auto result = run(c);
  EXPECT_EQ(result.rows.size(), 60u);
  for (const auto& row : result.rows) EXPECT_EQ(row.violated, row.r_ms > row.target_ms);
  std::ifstream in(c.output_dir / "intervals.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 61u);
  EXPECT_TRUE(fs::exists(c.output_dir / "rhdb" / "range_0_201.rhdb"));
  const auto db = rhdb::Rhdb::load(c.output_dir / "rhdb" / "range_0_201.rhdb");
  EXPECT_EQ(db, result.histories.front().db);
}

TEST_F(ExperimentTest, OptmRunWritesSummaryOnly) {
  const auto c = reference("optm", "optm");
  const auto result = run(c);
  EXPECT_TRUE(result.rows.empty());
  EXPECT_FALSE(fs::exists(c.output_dir / "intervals.csv"));
  const auto s = read_summary_csv(c.output_dir / "summary.csv");
  EXPECT_EQ(s.allocator, "optm");
  EXPECT_GT(s.evaluations, 0u);
  EXPECT_EQ(s.final_x, result.optm->x_opt);
}

TEST_F(ExperimentTest, SummaryRoundTrip) {
  Summary s;
  s.allocator = "pema";
  s.scenario_digest = "00ff";
  s.workload = "constant";
  s.lambda = 150;
  s.r_slo_ms = 90;
  s.steps = 12;
  s.final_x = sim::Allocation(std::vector<int>{12, 3});
  s.final_total_cpu = 1.5;
  s.steady_total_cpu = 1.5;
  s.violation_count = 2;
  s.iterations_to_convergence = 7;
  write_summary_csv(s, dir_ / "summary.csv");
  const auto back = read_summary_csv(dir_ / "summary.csv");
  EXPECT_EQ(back.final_x, s.final_x);
  EXPECT_EQ(back.violation_count, 2u);
  EXPECT_EQ(back.iterations_to_convergence, 7u);
  EXPECT_EQ(back.lambda, 150);
}

TEST_F(ExperimentTest, EventsChangeSloAndDemand) {
  auto c = reference("pema", "events");
  c.events = {Event{20, std::nullopt, 90.0}, Event{40, 1.1, std::nullopt}};
  const auto result = run_experiment(c, sim::load_scenario(c.scenario_path),
                                     workload_series(c));
  EXPECT_EQ(result.rows[19].target_ms, 120.0);
  EXPECT_EQ(result.rows[20].target_ms, 90.0);
  EXPECT_EQ(result.log.size(), 3u);
}

TEST_F(ExperimentTest, TraceRunSwitchesRangesDuringBurst) {
  {
    std::ofstream t(dir_ / "burst.csv");
    t << "timestamp,rps\n0,150\n2400,260\n3000,150\n6000,150\n";
  }
  auto c = parse_config(R"({"scenario":")" PEMA_SOURCE_DIR R"(/scenarios/reference5.json",
      "workload":{"trace":"burst.csv"},"pema":{"r_slo_ms":120},
      "ranges":{"min_rps":100,"max_rps":300,"initial_ranges":2,"split":false},"steps":40})",
                        dir_);
  c.output_dir = dir_ / "burst";
  const auto result = run(c);
  for (const auto& row : result.rows) {
    EXPECT_EQ(row.range_hi, row.lambda >= 200 ? 300 : 200);
  }
  EXPECT_NE(result.rows[20].controller, result.rows[19].controller);
}

TEST(CompareTest, SavingsPercent) {
  EXPECT_NEAR(savings_percent(1.1, 1.5), 26.666666666666668, 1e-9);
  EXPECT_EQ(savings_percent(2.0, 2.0), 0.0);
}

Summary summary(const std::string& allocator, double lambda, double total) {
  Summary s;
  s.allocator = allocator;
  s.scenario_digest = "abc";
  s.workload = "constant";
  s.lambda = lambda;
  s.final_total_cpu = total;
  s.steady_total_cpu = total;
  return s;
}

TEST(CompareTest, OneRowPerLevelNormalizedToOptm) {
  const std::vector<Summary> runs{summary("optm", 100, 10), summary("pema", 100, 11),
                                  summary("rule", 100, 15), summary("optm", 200, 20),
                                  summary("pema", 200, 22), summary("rule", 200, 22),
                                  summary("optm", 300, 30), summary("pema", 300, 33)};
  const auto rows = compare(runs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].pema_normalized, 1.1, 1e-12);
  EXPECT_NEAR(rows[0].rule_normalized, 1.5, 1e-12);
  EXPECT_NEAR(rows[0].savings_pct, 26.666666666666668, 1e-9);
  EXPECT_NEAR(rows[1].savings_pct, 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(rows[2].rule_total));
  EXPECT_NE(format_comparison(rows).find("26.67"), std::string::npos);
}

TEST(CompareTest, RejectsMixedScenarios) {
  std::vector<Summary> runs{summary("optm", 100, 10), summary("pema", 100, 11)};
  runs[1].scenario_digest = "other";
  EXPECT_THROW(compare(runs), ConfigError);
}

TEST_F(ExperimentTest, SweepProducesOneRowPerValue) {
  auto c = reference("pema", "sweep");
  c.steps = 30;
  c.sweep_seeds = {1, 2, 3, 4, 5};
  const std::vector<double> alphas{0.2, 0.5, 0.8};
  const auto rows = sweep(c, "alpha", alphas);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.runs, 5u);
  std::size_t runs = 0;
  for (const auto& e : fs::recursive_directory_iterator(c.output_dir)) {
    if (e.path().filename() == "summary.csv") ++runs;
  }
  EXPECT_EQ(runs, 15u);
  EXPECT_TRUE(fs::exists(c.output_dir / "sweep.csv"));
}

TEST_F(ExperimentTest, SweepRejectsBadInput) {
  auto c = reference("pema", "bad");
  const std::vector<double> none;
  EXPECT_THROW(sweep(c, "alpha", none), ConfigError);
  const std::vector<double> one{0.5};
  EXPECT_THROW(sweep(c, "gamma", one), ConfigError);
}

}  // namespace
}  // namespace pema::experiment
