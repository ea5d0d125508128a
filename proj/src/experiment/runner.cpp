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

#include "pema/experiment/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "pema/baselines/rule.hpp"
#include "pema/control/controller.hpp"
#include "pema/sim/simulator.hpp"
#include "pema/workload/ranged_autoscaler.hpp"
#include "pema/workload/trace.hpp"

namespace pema::experiment {
namespace {

constexpr std::size_t kSteadyWindow = 20;
constexpr double kConvergenceBand = 0.05;

std::string join_cores(const sim::Allocation& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt::format("{:.1f}", x.cores(i));
  }
  return out;
}

sim::Allocation parse_cores(const std::string& text) {
  std::vector<double> cores;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (!item.empty()) cores.push_back(std::stod(item));
  }
  return sim::Allocation::from_cores(cores);
}

std::multimap<std::size_t, Event> index_events(const ExperimentConfig& config) {
  std::multimap<std::size_t, Event> out;
  for (const auto& e : config.events) out.emplace(e.step, e);
  return out;
}

void summarize(RunResult& result, const ExperimentConfig& config, const sim::Scenario& scenario,
               std::span<const double> lambdas) {
  Summary& s = result.summary;
  s.allocator = std::string(to_string(config.allocator));
  s.scenario_digest = fmt::format("{:016x}", scenario.digest());
  s.workload = config.trace_path ? "trace" : "constant";
  if (config.constant_rps) {
    s.lambda = *config.constant_rps;
  } else if (!lambdas.empty()) {
    double sum = 0.0;
    for (double l : lambdas) sum += l;
    s.lambda = sum / static_cast<double>(lambdas.size());
  }
  s.r_slo_ms = config.pema.r_slo_ms;
  s.steps = result.rows.size();
  s.final_total_cpu = s.final_x.total_cores();
  s.violation_count = static_cast<std::size_t>(
      std::count_if(result.rows.begin(), result.rows.end(), [](const auto& r) { return r.violated; }));
  if (!result.rows.empty()) {
    const std::size_t take = std::min(kSteadyWindow, result.rows.size());
    double sum = 0.0;
    for (std::size_t i = result.rows.size() - take; i < result.rows.size(); ++i) {
      sum += result.rows[i].total_cpu;
    }
    s.steady_total_cpu = sum / static_cast<double>(take);
    s.iterations_to_convergence = result.rows.size();
    for (const auto& row : result.rows) {
      if (std::abs(row.total_cpu - s.final_total_cpu) <= kConvergenceBand * s.final_total_cpu) {
        s.iterations_to_convergence = static_cast<std::size_t>(row.t);
        break;
      }
    }
  } else {
    s.steady_total_cpu = s.final_total_cpu;
  }
}

IntervalRow make_row(const sim::MetricsSample& sample, const sim::Allocation& applied,
                     double range_hi, double target_ms, std::string action, int controller) {
  IntervalRow row;
  row.t = sample.t;
  row.lambda = sample.lambda;
  row.range_hi = range_hi;
  row.r_ms = sample.r_ms;
  row.target_ms = target_ms;
  row.total_cpu = applied.total_cores();
  row.action = std::move(action);
  row.violated = sample.r_ms > target_ms;
  row.controller = controller;
  row.x = applied;
  row.u = sample.u;
  row.h = sample.h;
  return row;
}

void run_pema(RunResult& result, const ExperimentConfig& config, const sim::Scenario& base,
              std::span<const double> lambdas, const sim::Allocation& initial) {
  workload::RangedConfig ranged;
  std::size_t learn_steps = 0;
  if (config.ranges) {
    ranged.lo = config.ranges->min_rps;
    ranged.hi = config.ranges->max_rps;
    ranged.initial_ranges = config.ranges->initial_ranges;
    ranged.min_width = config.ranges->min_width_rps;
    ranged.splitting = config.ranges->split;
    ranged.split.epsilon = config.ranges->split_epsilon;
    ranged.split.window = config.ranges->split_window;
    ranged.slope_ms_per_rps = config.ranges->slope_ms_per_rps;
    learn_steps = std::min(config.ranges->learn_slope_steps, lambdas.size());
  } else {
    ranged.lo = 0.0;
    ranged.hi = (lambdas.empty() ? 0.0 : *std::max_element(lambdas.begin(), lambdas.end())) + 1.0;
    ranged.splitting = false;
  }
  workload::RangedAutoscaler autoscaler(config.pema, initial, ranged, config.seed);
  result.log.push_back(fmt::format("t=0 ranges {}", autoscaler.tree().snapshot()));

  const auto events = index_events(config);
  sim::Scenario scenario = base;
  double r_slo = config.pema.r_slo_ms;
  auto apply_events = [&](std::size_t k) {
    auto [first, last] = events.equal_range(k);
    for (auto it = first; it != last; ++it) {
      if (it->second.demand_scale) {
        scenario = base.with_demand_scale(*it->second.demand_scale);
        result.log.push_back(fmt::format("t={} demand scale {}", k + 1, *it->second.demand_scale));
      }
      if (it->second.r_slo_ms) {
        r_slo = *it->second.r_slo_ms;
        autoscaler.set_r_slo(r_slo);
        result.log.push_back(fmt::format("t={} slo {} ms", k + 1, r_slo));
      }
    }
  };

  std::vector<std::pair<double, double>> slope_points;
  for (std::size_t k = 0; k < learn_steps; ++k) {
    apply_events(k);
    const auto sample = sim::step(scenario, initial, lambdas[k], static_cast<std::int64_t>(k + 1),
                                  config.pema.interval_s);
    slope_points.emplace_back(sample.lambda, sample.r_ms);
    const auto active = autoscaler.activate(lambdas[k]);
    result.rows.push_back(make_row(sample, initial, autoscaler.tree().node(active.node).hi, r_slo,
                                   "learn", active.controller));
  }
  if (learn_steps > 0) {
    try {
      const double slope = workload::learn_slope(slope_points);
      autoscaler.set_slope(slope);
      result.log.push_back(fmt::format("t={} learned slope {} ms/rps", learn_steps, slope));
    } catch (const std::invalid_argument& e) {
      result.log.push_back(fmt::format("t={} slope not learned: {}", learn_steps, e.what()));
    }
  }

  for (std::size_t k = learn_steps; k < lambdas.size(); ++k) {
    apply_events(k);
    const double lambda = lambdas[k];
    const auto active = autoscaler.activate(lambda);
    const sim::Allocation applied = autoscaler.allocation_for(lambda);
    const auto sample = sim::step(scenario, applied, lambda, static_cast<std::int64_t>(k + 1),
                                  config.pema.interval_s);
    const auto outcome = autoscaler.step(sample);
    result.rows.push_back(make_row(sample, applied, autoscaler.tree().node(active.node).hi,
                                   active.target_ms, std::string(control::to_string(outcome.decision.action)),
                                   active.controller));
    if (outcome.split) {
      result.log.push_back(fmt::format("t={} split controller {} -> new controller {}; ranges {}",
                                       k + 1, active.controller, outcome.split->new_controller,
                                       autoscaler.tree().snapshot()));
    }
  }

  result.summary.final_x =
      lambdas.empty() ? initial : autoscaler.allocation_for(lambdas.back());
  for (int leaf : autoscaler.tree().leaves()) {
    const auto& range = autoscaler.tree().node(leaf);
    result.histories.push_back(
        {range.lo, range.hi, range.controller_id, autoscaler.controller(range.controller_id).history()});
  }
}

void run_rule(RunResult& result, const ExperimentConfig& config, const sim::Scenario& base,
              std::span<const double> lambdas, const sim::Allocation& initial) {
  baselines::RuleAutoscaler rule(config.rule, initial);
  const auto events = index_events(config);
  sim::Scenario scenario = base;
  double r_slo = config.pema.r_slo_ms;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    auto [first, last] = events.equal_range(k);
    for (auto it = first; it != last; ++it) {
      if (it->second.demand_scale) scenario = base.with_demand_scale(*it->second.demand_scale);
      if (it->second.r_slo_ms) r_slo = *it->second.r_slo_ms;
    }
    const sim::Allocation applied = rule.allocation();
    const auto sample = sim::step(scenario, applied, lambdas[k], static_cast<std::int64_t>(k + 1),
                                  config.pema.interval_s);
    rule.observe(sample);
    result.rows.push_back(make_row(sample, applied, std::numeric_limits<double>::quiet_NaN(), r_slo,
                                   "rule", -1));
  }
  result.summary.final_x = rule.allocation();
}

std::string number_or_empty(double value, const char* format) {
  return std::isnan(value) ? std::string() : fmt::format(fmt::runtime(format), value);
}

}  // namespace

std::vector<double> workload_series(const ExperimentConfig& config) {
  if (config.constant_rps) return std::vector<double>(config.steps, *config.constant_rps);
  if (!config.trace_path) throw ConfigError("config has no workload");
  return workload::replay(workload::Trace::load(*config.trace_path), config.pema.interval_s,
                          config.steps);
}

RunResult run_experiment(const ExperimentConfig& config, const sim::Scenario& loaded,
                         std::span<const double> lambdas) {
  RunResult result;
  const sim::Scenario scenario =
      loaded.with_seed(loaded.rng_seed() ^ (config.seed * 0x9E3779B97F4A7C15ULL));
  const double peak = lambdas.empty() ? 0.0 : *std::max_element(lambdas.begin(), lambdas.end());

  if (config.allocator == AllocatorKind::kOptm) {
    const double lambda = config.constant_rps.value_or(peak);
    const auto noise_free = loaded.with_noise(0.0);
    baselines::OptmResult optm =
        config.optm_cache_dir
            ? baselines::OptmCache(*config.optm_cache_dir).search(noise_free, lambda, config.pema.r_slo_ms)
            : baselines::optm_search(noise_free, lambda, config.pema.r_slo_ms,
                                     baselines::ample_allocation(noise_free, lambda, 0.15,
                                                                 config.pema.floor_quanta),
                                     config.pema.floor_quanta);
    result.summary.final_x = optm.x_opt;
    result.summary.evaluations = optm.evaluations;
    result.optm = std::move(optm);
    summarize(result, config, loaded, lambdas);
    result.summary.lambda = lambda;
    return result;
  }

  const double reference = config.ranges ? config.ranges->max_rps : peak;
  const sim::Allocation initial = baselines::ample_allocation(
      scenario, reference, config.initial_utilization, config.pema.floor_quanta);

  if (config.allocator == AllocatorKind::kPema) {
    run_pema(result, config, scenario, lambdas, initial);
  } else {
    run_rule(result, config, scenario, lambdas, initial);
  }
  summarize(result, config, loaded, lambdas);
  return result;
}

void write_intervals_csv(const RunResult& result, const sim::Scenario& scenario,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "t,lambda,range_hi,r_ms,r_slo_target_ms,total_cpu,action,violated";
  for (const char* prefix : {"x_", "u_", "h_"}) {
    for (const auto& s : scenario.services()) out << ',' << prefix << s.name;
  }
  out << '\n';
  for (const auto& row : result.rows) {
    out << fmt::format("{},{:g},{},{:.4f},{:.4f},{:.1f},{},{}", row.t, row.lambda,
                       number_or_empty(row.range_hi, "{:g}"), row.r_ms, row.target_ms,
                       row.total_cpu, row.action, row.violated ? 1 : 0);
    for (std::size_t i = 0; i < row.x.size(); ++i) out << fmt::format(",{:.1f}", row.x.cores(i));
    for (double u : row.u) out << fmt::format(",{:.6f}", u);
    for (double h : row.h) out << fmt::format(",{:.4f}", h);
    out << '\n';
  }
}

void write_summary_csv(const Summary& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "allocator,scenario_digest,workload,lambda,r_slo_ms,steps,final_total_cpu,"
         "steady_total_cpu,violation_count,iterations_to_convergence,evaluations,final_x\n";
  out << fmt::format("{},{},{},{:g},{:g},{},{:.1f},{:.4f},{},{},{},{}\n", s.allocator,
                     s.scenario_digest, s.workload, s.lambda, s.r_slo_ms, s.steps,
                     s.final_total_cpu, s.steady_total_cpu, s.violation_count,
                     s.iterations_to_convergence, s.evaluations, join_cores(s.final_x));
}

Summary read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::string header;
  std::string line;
  std::getline(in, header);
  if (!std::getline(in, line)) throw ConfigError(fmt::format("'{}' has no data row", path.string()));
  std::vector<std::string> fields;
  std::stringstream row(line);
  std::string item;
  while (std::getline(row, item, ',')) fields.push_back(item);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.size() != 12) {
    throw ConfigError(fmt::format("'{}' is not a summary file", path.string()));
  }
  Summary s;
  try {
    s.allocator = fields[0];
    s.scenario_digest = fields[1];
    s.workload = fields[2];
    s.lambda = std::stod(fields[3]);
    s.r_slo_ms = std::stod(fields[4]);
    s.steps = std::stoul(fields[5]);
    s.final_total_cpu = std::stod(fields[6]);
    s.steady_total_cpu = std::stod(fields[7]);
    s.violation_count = std::stoul(fields[8]);
    s.iterations_to_convergence = std::stoul(fields[9]);
    s.evaluations = std::stoul(fields[10]);
    s.final_x = parse_cores(fields[11]);
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("'{}' has a malformed field", path.string()));
  }
  return s;
}

RunResult run(const ExperimentConfig& config) {
  const sim::Scenario scenario = sim::load_scenario(config.scenario_path);
  const auto lambdas = workload_series(config);
  RunResult result = run_experiment(config, scenario, lambdas);

  std::filesystem::create_directories(config.output_dir);
  if (config.allocator != AllocatorKind::kOptm) {
    write_intervals_csv(result, scenario, config.output_dir / "intervals.csv");
  }
  write_summary_csv(result.summary, config.output_dir / "summary.csv");
  {
    std::ofstream log(config.output_dir / "run.log", std::ios::binary | std::ios::trunc);
    for (const auto& line : result.log) log << line << '\n';
  }
  if (!result.histories.empty()) {
    const auto dir = config.output_dir / "rhdb";
    std::filesystem::create_directories(dir);
    for (const auto& h : result.histories) {
      h.db.persist(dir / fmt::format("range_{:g}_{:g}.rhdb", h.lo, h.hi));
    }
  }
  return result;
}

}  // namespace pema::experiment
