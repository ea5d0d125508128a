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

#include "pema/experiment/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "pema/baselines/optm.hpp"

namespace pema::experiment {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// PEMA and RULE are compared on their steady-state mean; OPTM has no loop.
double settled_total(const Summary& s) {
  return s.allocator == "optm" ? s.final_total_cpu : s.steady_total_cpu;
}

struct Accumulator {
  double sum = 0.0;
  std::size_t n = 0;
  double mean() const { return n == 0 ? kNaN : sum / static_cast<double>(n); }
};

std::string cell(double value) {
  return std::isnan(value) ? std::string() : fmt::format("{:.4f}", value);
}

std::string text_cell(double value) {
  return std::isnan(value) ? std::string("-") : fmt::format("{:.2f}", value);
}

}  // namespace

double savings_percent(double pema_total, double rule_total) {
  if (!(rule_total > 0.0)) return kNaN;
  return (rule_total - pema_total) / rule_total * 100.0;
}

std::vector<ComparisonRow> compare(std::span<const Summary> summaries) {
  if (summaries.empty()) return {};
  const std::string& digest = summaries.front().scenario_digest;
  // Trace runs collapse into one level; OPTM sizes those for the peak.
  using Key = std::tuple<std::string, double>;
  std::map<Key, std::array<Accumulator, 3>> totals;
  std::map<Key, Accumulator> rates;
  for (const auto& s : summaries) {
    if (s.scenario_digest != digest) {
      throw ConfigError(fmt::format("summaries mix scenarios {} and {}", digest, s.scenario_digest));
    }
    const Key key{s.workload, s.workload == "trace" ? 0.0 : s.lambda};
    const std::size_t slot = s.allocator == "optm" ? 0 : s.allocator == "pema" ? 1 : 2;
    totals[key][slot].sum += settled_total(s);
    totals[key][slot].n += 1;
    if (s.allocator != "optm") {
      rates[key].sum += s.lambda;
      rates[key].n += 1;
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [key, acc] : totals) {
    ComparisonRow row;
    row.workload = std::get<0>(key);
    row.lambda = row.workload == "trace" ? rates[key].mean() : std::get<1>(key);
    row.optm_total = acc[0].mean();
    row.pema_total = acc[1].mean();
    row.rule_total = acc[2].mean();
    row.pema_normalized = row.pema_total / row.optm_total;
    row.rule_normalized = row.rule_total / row.optm_total;
    row.savings_pct = savings_percent(row.pema_total, row.rule_total);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ComparisonRow> compare_dirs(std::span<const std::filesystem::path> run_dirs) {
  std::vector<Summary> summaries;
  summaries.reserve(run_dirs.size());
  for (const auto& dir : run_dirs) summaries.push_back(read_summary_csv(dir / "summary.csv"));
  return compare(summaries);
}

void write_comparison_csv(std::span<const ComparisonRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "workload,lambda,optm_total,pema_total,rule_total,pema_normalized,rule_normalized,"
         "savings_pct\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:g},{},{},{},{},{},{}\n", r.workload, r.lambda, cell(r.optm_total),
                       cell(r.pema_total), cell(r.rule_total), cell(r.pema_normalized),
                       cell(r.rule_normalized), cell(r.savings_pct));
  }
}

std::string format_comparison(std::span<const ComparisonRow> rows) {
  std::string out = fmt::format("{:<9} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9} {:>9}\n", "workload",
                                "lambda", "optm", "pema", "rule", "pema/opt", "rule/opt",
                                "savings%");
  for (const auto& r : rows) {
    out += fmt::format("{:<9} {:>8.1f} {:>8} {:>8} {:>8} {:>9} {:>9} {:>9}\n", r.workload,
                       r.lambda, text_cell(r.optm_total), text_cell(r.pema_total),
                       text_cell(r.rule_total), text_cell(r.pema_normalized),
                       text_cell(r.rule_normalized), text_cell(r.savings_pct));
  }
  return out;
}

void set_sweep_param(ExperimentConfig& config, const std::string& param, double value) {
  if (param == "alpha") {
    config.pema.alpha = value;
  } else if (param == "beta") {
    config.pema.beta = value;
  } else if (param == "explore_a") {
    config.pema.explore_a = value;
  } else if (param == "explore_b") {
    config.pema.explore_b = value;
  } else {
    throw ConfigError(fmt::format("cannot sweep '{}'; expected alpha, beta, explore_a or explore_b",
                                  param));
  }
  try {
    config.pema.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}={}: {}", param, value, e.what()));
  }
}

std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& param,
                            std::span<const double> values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (config.allocator != AllocatorKind::kPema) {
    throw ConfigError("sweeps vary controller parameters and need allocator \"pema\"");
  }
  if (!config.constant_rps) {
    throw ConfigError("sweeps normalize by the optimum and need a constant workload");
  }
  const sim::Scenario scenario = sim::load_scenario(config.scenario_path);
  const double lambda = *config.constant_rps;
  const auto noise_free = scenario.with_noise(0.0);
  const double optm_total =
      config.optm_cache_dir
          ? baselines::OptmCache(*config.optm_cache_dir)
                .search(noise_free, lambda, config.pema.r_slo_ms)
                .total_cores
          : baselines::optm_search(noise_free, lambda, config.pema.r_slo_ms,
                                   config.pema.floor_quanta)
                .total_cores;

  std::vector<std::uint64_t> seeds = config.sweep_seeds;
  if (seeds.empty()) seeds.push_back(config.seed);

  std::vector<ExperimentConfig> jobs;
  for (double value : values) {
    for (std::uint64_t seed : seeds) {
      ExperimentConfig job = config;
      set_sweep_param(job, param, value);
      job.seed = seed;
      job.output_dir = config.output_dir / fmt::format("{}_{:g}", param, value) /
                       fmt::format("seed_{}", seed);
      jobs.push_back(std::move(job));
    }
  }
  std::vector<std::future<Summary>> futures;
  futures.reserve(jobs.size());
  for (const auto& job : jobs) {
    futures.push_back(std::async(std::launch::async, [&job] { return run(job).summary; }));
  }

  std::vector<SweepRow> rows;
  std::size_t next = 0;
  for (double value : values) {
    SweepRow row{param, value, seeds.size(), 0.0, 0.0};
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const Summary s = futures[next++].get();
      row.mean_normalized_total += s.steady_total_cpu / optm_total;
      row.mean_violations += static_cast<double>(s.violation_count);
    }
    row.mean_normalized_total /= static_cast<double>(seeds.size());
    row.mean_violations /= static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  std::filesystem::create_directories(config.output_dir);
  write_sweep_csv(rows, config.output_dir / "sweep.csv");
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << "param,value,runs,mean_normalized_total,mean_violations\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:g},{},{:.4f},{:.2f}\n", r.param, r.value, r.runs,
                       r.mean_normalized_total, r.mean_violations);
  }
}

std::string format_sweep(std::span<const SweepRow> rows) {
  std::string out = fmt::format("{:<10} {:>8} {:>5} {:>10} {:>10}\n", "param", "value", "runs",
                                "total/opt", "violations");
  for (const auto& r : rows) {
    out += fmt::format("{:<10} {:>8g} {:>5} {:>10.3f} {:>10.2f}\n", r.param, r.value, r.runs,
                       r.mean_normalized_total, r.mean_violations);
  }
  return out;
}

}  // namespace pema::experiment
