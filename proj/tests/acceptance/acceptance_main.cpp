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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "equation_tables.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "pema/baselines/optm.hpp"
#include "pema/baselines/rule.hpp"
#include "pema/control/controller.hpp"
#include "pema/control/equations.hpp"
#include "pema/experiment/runner.hpp"
#include "pema/sim/simulator.hpp"
#include "pema/workload/ranged_autoscaler.hpp"
#include "pema/workload/ranges.hpp"

namespace pema::acceptance {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Shared fixtures for the convergence and comparison criteria.

constexpr double kBaseRps = 200.0;
constexpr double kReferenceLoad = 0.7;

struct Case {
  sim::Scenario scenario;
  double lambda;
  double r_slo_ms;
};

// Latency target: the noise-free latency with every service at the reference
// offered load.
double slo_for(const sim::Scenario& s, double lambda, double load) {
  std::vector<double> cores;
  for (const auto& spec : s.services()) cores.push_back(lambda * spec.visit_ratio * spec.demand_s / load);
  std::vector<double> latency;
  for (std::size_t i = 0; i < s.size(); ++i) {
    latency.push_back(sim::per_service_latency(
        s.service(i), sim::per_service_load(s.service(i), cores[i], lambda)));
  }
  return sim::end_to_end_latency(s, latency);
}

std::vector<Case> small_cases() {
  std::vector<Case> out;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng(1000 + k);
    sim::Scenario s = testing::random_scenario(rng, 3, 5, 0.0);
    out.push_back({s, kBaseRps, slo_for(s, kBaseRps, kReferenceLoad)});
  }
  return out;
}

experiment::ExperimentConfig base_config(experiment::AllocatorKind kind, double r_slo,
                                         std::uint64_t seed, std::size_t steps) {
  experiment::ExperimentConfig c;
  c.allocator = kind;
  c.pema.r_slo_ms = r_slo;
  c.seed = seed;
  c.steps = steps;
  return c;
}


Outcome equation_conformance() {
  using namespace control;
  std::size_t cases = 0;
  std::size_t bad = 0;
  auto check = [&](double got, double want) {
    ++cases;
    if (!(std::abs(got - want) <= 1e-9)) ++bad;
  };
  for (const auto& c : testing::kCountCases) {
    check(static_cast<double>(target_count(c.target, c.alpha, c.r_eff, c.n)),
          static_cast<double>(c.expected));
  }
  for (const auto& c : testing::kFractionCases) {
    check(reduction_fraction(c.target, c.alpha, c.beta, c.r_eff), c.expected);
  }
  for (const auto& c : testing::kExploreCases) {
    check(exploration_probability(c.target, c.alpha, c.a, c.b, c.r_eff), c.expected);
  }
  for (const auto& c : testing::kSelectionCases) {
    sim::MetricsSample s;
    s.u = c.u;
    s.h.assign(c.u.size(), 0.0);
    const ThresholdState th{c.u_th, std::vector<double>(c.u.size(), 0.0)};
    const auto p = selection_probabilities(s, th, c.candidates);
    if (p.size() != c.expected.size()) {
      ++bad;
      continue;
    }
    for (std::size_t i = 0; i < p.size(); ++i) check(p[i], c.expected[i]);
  }
  for (const auto& c : testing::kThresholdCases) {
    sim::MetricsSample s;
    s.u = c.u;
    s.h = c.h;
    const auto next = update_thresholds(ThresholdState{c.u_th, c.h_th}, s);
    for (std::size_t i = 0; i < c.u.size(); ++i) {
      check(next.u_th[i], c.expected_u[i]);
      check(next.h_th[i], c.expected_h[i]);
    }
  }
  for (const auto& c : testing::kTargetCases) {
    workload::WorkloadRange r;
    r.lo = c.lo;
    r.hi = c.hi;
    r.slope_ms_per_rps = c.slope;
    check(workload::dynamic_target(r, c.lambda, c.r_slo), c.expected);
  }
  return {bad == 0, fmt::format("{} values checked, {} off by more than 1e-9", cases, bad)};
}

Outcome monotonicity_suite() {
  Rng rng(2);
  std::size_t trials = 0;
  std::size_t violations = 0;
  for (int k = 0; k < 200; ++k) {
    const auto s = testing::random_scenario(rng, 3, 10, 0.0);
    const double lambda = testing::uniform(rng, 20, 400);
    for (int j = 0; j < 10; ++j) {
      const auto x = testing::allocation_at_load(rng, s, lambda, 0.05, 1.2);
      const auto y = testing::random_monotonic_reduction(rng, x, 0.5);
      if (y == x) continue;
      ++trials;
      const auto t = static_cast<std::int64_t>(j + 1);
      if (sim::step(s, y, lambda, t).r_ms < sim::step(s, x, lambda, t).r_ms) ++violations;
    }
  }
  return {violations == 0,
          fmt::format("200 scenarios, {} reductions, {} latency decreases", trials, violations)};
}

Outcome noise_calibration() {
  Rng rng(3);
  std::size_t drops = 0;
  const int trials = 1000;
  for (int k = 0; k < trials; ++k) {
    const auto s = testing::random_scenario(rng, 3, 10, sim::kDefaultNoiseSigma);
    const double lambda = testing::uniform(rng, 50, 300);
    const auto x = testing::allocation_at_load(rng, s, lambda, 0.2, 0.7);
    const auto y = testing::random_monotonic_reduction(rng, x, 0.3);
    const auto t = static_cast<std::int64_t>(2 * k + 1);
    if (sim::step(s, y, lambda, t + 1).r_ms < sim::step(s, x, lambda, t).r_ms) ++drops;
  }
  const double fraction = static_cast<double>(drops) / trials;
  return {fraction >= 0.05 && fraction <= 0.15,
          fmt::format("sigma={} anti-monotonic fraction {:.1f}% ({} of {})",
                      sim::kDefaultNoiseSigma, 100 * fraction, drops, trials)};
}

Outcome qos_safety() {
  std::size_t reduce_above = 0;
  std::size_t missed_rollbacks = 0;
  std::size_t violations = 0;
  std::size_t reductions = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed * 101);
    const auto s = testing::random_scenario(rng, 3, 8, 0.0);
    const double lambda = testing::uniform(rng, 100, 300);
    const double r_slo = slo_for(s, lambda, testing::uniform(rng, 0.4, 0.9));
    const auto initial = baselines::ample_allocation(s, lambda);
    control::PemaParams p;
    p.r_slo_ms = r_slo;
    control::PemaController c(p, initial, seed);
    bool expect_rollback = false;
    for (int t = 1; t <= 150; ++t) {
      const auto sample = sim::step(s, c.allocation(), lambda, t);
      const auto d = c.step(sample);
      if (d.action == control::Action::kReduce) {
        ++reductions;
        if (d.r_eff_ms >= d.target_ms) ++reduce_above;
      }
      expect_rollback = sample.r_ms > r_slo;
      if (expect_rollback) {
        ++violations;
        if (d.action != control::Action::kRollback) ++missed_rollbacks;
      }
    }
  }
  return {reduce_above == 0 && missed_rollbacks == 0,
          fmt::format("50 runs: {} reductions, {} at or above target; {} violations, {} not "
                      "followed by rollback",
                      reductions, reduce_above, violations, missed_rollbacks)};
}

Outcome near_optimum() {
  const auto cases = small_cases();
  std::size_t ok = 0;
  std::vector<std::string> ratios;
  for (const auto& c : cases) {
    const auto optm = baselines::optm_search(c.scenario, c.lambda, c.r_slo_ms);
    std::vector<double> totals;
    const std::vector<double> lambdas(150, c.lambda);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto cfg = base_config(experiment::AllocatorKind::kPema, c.r_slo_ms, seed, 150);
      totals.push_back(experiment::run_experiment(cfg, c.scenario, lambdas).summary.steady_total_cpu);
    }
    const double ratio = median(totals) / optm.total_cores;
    if (std::abs(ratio - 1.0) <= 0.15) ++ok;
    ratios.push_back(fmt::format("{:.3f}", ratio));
  }
  return {ok == cases.size(),
          fmt::format("{}/{} scenarios within 15%; median PEMA/OPTM = [{}]", ok, cases.size(),
                      fmt::join(ratios, " "))};
}

// Base rate with two-interval bursts at 1.5x every ten intervals.
std::vector<double> bursty_series(double base, std::size_t steps) {
  std::vector<double> out;
  for (std::size_t k = 0; k < steps; ++k) out.push_back(k % 10 >= 8 ? 1.5 * base : base);
  return out;
}

Outcome pema_vs_rule() {
  const auto cases = small_cases();
  std::size_t wins = 0;
  std::vector<std::string> savings;
  std::vector<double> values;
  for (const auto& c : cases) {
    const auto lambdas = bursty_series(c.lambda, 150);
    experiment::RangeSpec ranges;
    ranges.min_rps = 0.5 * c.lambda;
    ranges.max_rps = 1.75 * c.lambda;
    ranges.initial_ranges = 2;
    ranges.split = false;
    std::vector<double> pema_totals;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto pema = base_config(experiment::AllocatorKind::kPema, c.r_slo_ms, seed, 150);
      pema.ranges = ranges;
      pema_totals.push_back(
          experiment::run_experiment(pema, c.scenario, lambdas).summary.steady_total_cpu);
    }
    const auto rule = base_config(experiment::AllocatorKind::kRule, c.r_slo_ms, 1, 150);
    const double p = median(pema_totals);
    const double r = experiment::run_experiment(rule, c.scenario, lambdas).summary.steady_total_cpu;
    if (p <= r) ++wins;
    values.push_back(100.0 * (r - p) / r);
    savings.push_back(fmt::format("{:.1f}", values.back()));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {wins >= 8, fmt::format("PEMA <= RULE in {}/10; savings % [{}], median {:.1f}, range "
                                 "{:.1f}..{:.1f}",
                                 wins, fmt::join(savings, " "), median(values), *lo, *hi)};
}

Outcome optm_validation() {
  Rng rng(7);
  std::size_t checked = 0;
  std::size_t exact = 0;
  std::size_t off = 0;
  std::size_t not_fixed = 0;
  int worst_gap = 0;
  while (checked < 60) {
    const auto s = testing::random_scenario(rng, 2, 2, 0.0);
    const double lambda = testing::uniform(rng, 40, 120);
    const auto start = baselines::ample_allocation(s, lambda);
    if (start.quanta(0) > 40 || start.quanta(1) > 40) continue;
    const double r_slo = slo_for(s, lambda, testing::uniform(rng, 0.3, 0.9));
    if (sim::noise_free_latency(s, start, lambda) > r_slo) continue;
    ++checked;
    const auto greedy = baselines::optm_search(s, lambda, r_slo, start, 1);
    const auto grid = testing::grid_search_two(s, lambda, r_slo, 40);
    const int gap = greedy.x_opt.total_quanta() - grid->total_quanta;
    worst_gap = std::max(worst_gap, gap);
    if (gap == 0) ++exact;
    if (gap > 2 || gap < 0) ++off;
    if (!baselines::is_optm_fixed_point(s, lambda, r_slo, greedy.x_opt)) ++not_fixed;
  }
  return {off == 0 && not_fixed == 0,
          fmt::format("{} two-service scenarios: {} exact, worst gap {} quanta, {} beyond one "
                      "quantum per service, {} not fixed points",
                      checked, exact, worst_gap, off, not_fixed)};
}

// Intervals until the applied total first drops within 10% of `optm_total`.
std::size_t steps_to_near(const std::vector<double>& totals, double optm_total) {
  for (std::size_t i = 0; i < totals.size(); ++i) {
    if (totals[i] <= 1.10 * optm_total) return i;
  }
  return totals.size();
}

Outcome range_split_bootstrap() {
  const auto s = sim::load_scenario(PEMA_SOURCE_DIR "/scenarios/reference5.json");
  const double r_slo = 120.0;
  const double high = 390.0;
  const double low = 290.0;
  const double optm_low = baselines::optm_search(s.with_noise(0.0), low, r_slo).total_cores;
  const auto initial = baselines::ample_allocation(s, 400.0);
  control::PemaParams p;
  p.r_slo_ms = r_slo;
  std::vector<double> child_steps;
  std::vector<double> cold_steps;
  std::size_t splits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto noisy = s.with_seed(seed);
    workload::RangedConfig cfg;
    cfg.lo = 200;
    cfg.hi = 400;
    cfg.min_width = 100;
    workload::RangedAutoscaler scaler(p, initial, cfg, seed);
    std::int64_t t = 1;
    bool split = false;
    for (; t <= 200 && !split; ++t) {
      const auto sample = sim::step(noisy, scaler.allocation_for(high), high, t);
      split = scaler.step(sample).split.has_value();
    }
    if (!split) continue;
    ++splits;
    std::vector<double> child;
    for (int k = 0; k < 100; ++k, ++t) {
      const auto applied = scaler.allocation_for(low);
      child.push_back(applied.total_cores());
      scaler.step(sim::step(noisy, applied, low, t));
    }
    child_steps.push_back(static_cast<double>(steps_to_near(child, optm_low)));

    control::PemaController cold(p, initial, seed + 1000);
    std::vector<double> fresh;
    for (int k = 1; k <= 100; ++k) {
      fresh.push_back(cold.allocation().total_cores());
      cold.step(sim::step(noisy, cold.allocation(), low, k));
    }
    cold_steps.push_back(static_cast<double>(steps_to_near(fresh, optm_low)));
  }
  if (splits < 10) return {false, fmt::format("only {}/10 runs split", splits)};
  const double child_median = median(child_steps);
  const double cold_median = median(cold_steps);
  return {child_median < cold_median,
          fmt::format("median intervals to within 10% of OPTM({:.0f} rps)={:.1f}: bootstrapped "
                      "child {:.1f}, cold start {:.1f}",
                      low, optm_low, child_median, cold_median)};
}

// Steady-state total after a mid-run change, against OPTM for the new setting,
// plus burst routing.
Outcome adaptability() {
  const auto s = sim::load_scenario(PEMA_SOURCE_DIR "/scenarios/reference5.json");
  const double lambda = 200.0;
  const double r_slo = 250.0;
  const std::size_t steps = 300;
  const std::size_t at = 150;
  const std::vector<double> lambdas(steps, lambda);
  std::vector<std::string> parts;
  bool ok = true;

  auto settle = [&](const experiment::Event& event, const sim::Scenario& after, double r_after,
                    const std::string& label) {
    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto cfg = base_config(experiment::AllocatorKind::kPema, r_slo, seed, steps);
      cfg.events = {event};
      const auto result = experiment::run_experiment(cfg, s, lambdas);
      const double optm = baselines::optm_search(after.with_noise(0.0), lambda, r_after).total_cores;
      ratios.push_back(result.summary.steady_total_cpu / optm);
    }
    const double m = median(ratios);
    const bool pass = std::abs(m - 1.0) <= 0.15;
    ok = ok && pass;
    parts.push_back(fmt::format("{} {:.3f}", label, m));
  };
  settle({at, 0.9, std::nullopt}, s.with_demand_scale(0.9), r_slo, "demand x0.9");
  settle({at, 1.1, std::nullopt}, s.with_demand_scale(1.1), r_slo, "demand x1.1");
  settle({at, std::nullopt, r_slo / 2}, s, r_slo / 2, "slo halved");

  // Burst: 400 rps with a ten-minute burst to 750 rps.
  const std::vector<double> burst = [] {
    std::vector<double> v(60, 400.0);
    for (std::size_t k = 30; k < 35; ++k) v[k] = 750.0;
    return v;
  }();
  control::PemaParams p;
  p.r_slo_ms = r_slo;
  workload::RangedConfig cfg;
  cfg.lo = 200;
  cfg.hi = 1000;
  cfg.initial_ranges = 2;
  cfg.splitting = false;
  workload::RangedAutoscaler scaler(p, baselines::ample_allocation(s, 1000.0), cfg, 1);
  const int high_controller = scaler.activate(750).controller;
  std::size_t burst_intervals = 0;
  std::size_t handled = 0;
  for (std::size_t k = 0; k < burst.size(); ++k) {
    const auto active = scaler.activate(burst[k]);
    const sim::Allocation expected = scaler.controller(active.controller).allocation();
    const sim::Allocation applied = scaler.allocation_for(burst[k]);
    if (burst[k] == 750.0) {
      ++burst_intervals;
      if (active.controller == high_controller && applied == expected) ++handled;
    }
    scaler.step(sim::step(s, applied, burst[k], static_cast<std::int64_t>(k + 1)));
  }
  const bool burst_ok = burst_intervals > 0 && handled == burst_intervals;
  ok = ok && burst_ok;
  parts.push_back(fmt::format("burst {}/{} intervals on the high-range controller", handled,
                              burst_intervals));
  return {ok, fmt::format("median steady/OPTM over 10 seeds: {}", fmt::join(parts, "; "))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

Outcome determinism_and_persistence() {
  const fs::path root = fs::temp_directory_path() / "pema_acceptance_determinism";
  fs::remove_all(root);
  auto cfg = experiment::load_config(PEMA_SOURCE_DIR "/configs/pema_reference.json");
  cfg.optm_cache_dir.reset();
  cfg.output_dir = root / "a";
  const auto first = experiment::run(cfg);
  cfg.output_dir = root / "b";
  experiment::run(cfg);
  const bool same_csv = slurp(root / "a" / "intervals.csv") == slurp(root / "b" / "intervals.csv");

  std::size_t files = 0;
  std::size_t exact = 0;
  for (const auto& h : first.histories) {
    ++files;
    const auto path = root / "a" / "rhdb" / fmt::format("range_{:g}_{:g}.rhdb", h.lo, h.hi);
    if (rhdb::Rhdb::load(path) == h.db) ++exact;
  }
  Rng rng(10);
  rhdb::Rhdb big(6);
  for (int t = 1; t <= 1000; ++t) {
    rhdb::Entry e;
    e.t = t;
    e.lambda = testing::uniform(rng, 0, 1000);
    e.r_ms = testing::uniform(rng, 1, 500);
    e.violated = testing::uniform(rng, 0, 1) < 0.1;
    std::vector<int> q(6);
    for (auto& v : q) v = static_cast<int>(testing::uniform_index(rng, 1, 400));
    e.x = sim::Allocation(q);
    for (int i = 0; i < 6; ++i) {
      e.u_th.push_back(testing::uniform(rng, 0, 1));
      e.h_th.push_back(testing::uniform(rng, 0, 120));
    }
    big.insert(e);
  }
  big.persist(root / "big.rhdb");
  ++files;
  if (rhdb::Rhdb::load(root / "big.rhdb") == big) ++exact;
  fs::remove_all(root);
  return {same_csv && exact == files,
          fmt::format("intervals.csv {}; {}/{} RHDb round trips exact",
                      same_csv ? "byte-identical" : "differs", exact, files)};
}

}  // namespace
}  // namespace pema::acceptance

int main() {
  using namespace pema::acceptance;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"equation conformance", equation_conformance},
      {"monotonicity suite", monotonicity_suite},
      {"noise calibration", noise_calibration},
      {"QoS safety", qos_safety},
      {"near-optimum convergence", near_optimum},
      {"PEMA vs RULE", pema_vs_rule},
      {"OPTM validation", optm_validation},
      {"range-split bootstrap", range_split_bootstrap},
      {"adaptability", adaptability},
      {"determinism and persistence", determinism_and_persistence},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    fmt::print("{} {:>2} {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail, secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
