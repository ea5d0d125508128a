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

#include "pema/experiment/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pema/sim/allocation.hpp"

namespace pema::experiment {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& allowed, std::string_view where) {
  if (!object.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
  }
}

template <typename T>
void read(const json& object, const char* key, T& out, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad value for '{}' in {}: {}", key, where, e.what()));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

std::string_view to_string(AllocatorKind kind) {
  switch (kind) {
    case AllocatorKind::kPema:
      return "pema";
    case AllocatorKind::kRule:
      return "rule";
    case AllocatorKind::kOptm:
      return "optm";
  }
  return "unknown";
}

AllocatorKind allocator_from_string(std::string_view text) {
  if (text == "pema") return AllocatorKind::kPema;
  if (text == "rule") return AllocatorKind::kRule;
  if (text == "optm") return AllocatorKind::kOptm;
  throw ConfigError(fmt::format("unknown allocator '{}' (expected pema, rule or optm)", text));
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON (byte {}): {}", e.byte, e.what()));
  }
  reject_unknown(doc,
                 {"scenario", "workload", "allocator", "pema", "rule", "ranges",
                  "initial_utilization", "output_dir", "seed", "steps", "sweep_seeds",
                  "optm_cache_dir", "events"},
                 "config");

  ExperimentConfig config;
  std::string scenario;
  read(doc, "scenario", scenario, "config");
  if (scenario.empty()) throw ConfigError("config needs a 'scenario' path");
  config.scenario_path = resolve(base_dir, scenario);

  if (!doc.contains("workload")) throw ConfigError("config needs a 'workload' block");
  const json& workload = doc.at("workload");
  reject_unknown(workload, {"constant_rps", "trace"}, "workload");
  if (workload.contains("constant_rps") == workload.contains("trace")) {
    throw ConfigError("workload needs exactly one of 'constant_rps' or 'trace'");
  }
  if (workload.contains("constant_rps")) {
    double rps = 0.0;
    read(workload, "constant_rps", rps, "workload");
    if (!(rps >= 0.0)) throw ConfigError("constant_rps must be >= 0");
    config.constant_rps = rps;
  } else {
    std::string trace;
    read(workload, "trace", trace, "workload");
    config.trace_path = resolve(base_dir, trace);
  }

  std::string allocator = "pema";
  read(doc, "allocator", allocator, "config");
  config.allocator = allocator_from_string(allocator);

  if (doc.contains("pema")) {
    const json& p = doc.at("pema");
    reject_unknown(p,
                   {"r_slo_ms", "alpha", "beta", "explore_a", "explore_b", "window_k", "interval_s",
                    "floor_cores", "buffer_fraction", "skip_superseded_history"},
                   "pema");
    read(p, "r_slo_ms", config.pema.r_slo_ms, "pema");
    read(p, "alpha", config.pema.alpha, "pema");
    read(p, "beta", config.pema.beta, "pema");
    read(p, "explore_a", config.pema.explore_a, "pema");
    read(p, "explore_b", config.pema.explore_b, "pema");
    read(p, "window_k", config.pema.window_k, "pema");
    read(p, "interval_s", config.pema.interval_s, "pema");
    double floor_cores = sim::quanta_to_cores(config.pema.floor_quanta);
    read(p, "floor_cores", floor_cores, "pema");
    config.pema.floor_quanta = sim::quantize_nearest(floor_cores);
    read(p, "buffer_fraction", config.pema.buffer_fraction, "pema");
    read(p, "skip_superseded_history", config.pema.skip_superseded_history, "pema");
  }
  try {
    config.pema.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  config.rule.floor_quanta = config.pema.floor_quanta;

  if (doc.contains("rule")) {
    const json& r = doc.at("rule");
    reject_unknown(r, {"overprovision", "percentile", "lookback"}, "rule");
    read(r, "overprovision", config.rule.overprovision, "rule");
    read(r, "percentile", config.rule.percentile, "rule");
    read(r, "lookback", config.rule.lookback, "rule");
    if (!(config.rule.overprovision > 0.0) || config.rule.lookback == 0 ||
        !(config.rule.percentile > 0.0 && config.rule.percentile <= 1.0)) {
      throw ConfigError("rule block out of range");
    }
  }

  if (doc.contains("ranges")) {
    const json& r = doc.at("ranges");
    reject_unknown(r,
                   {"min_rps", "max_rps", "initial_ranges", "min_width_rps", "split",
                    "split_epsilon", "split_window", "slope_ms_per_rps", "learn_slope_steps"},
                   "ranges");
    RangeSpec spec;
    if (!r.contains("min_rps") || !r.contains("max_rps")) {
      throw ConfigError("ranges needs 'min_rps' and 'max_rps'");
    }
    read(r, "min_rps", spec.min_rps, "ranges");
    read(r, "max_rps", spec.max_rps, "ranges");
    read(r, "initial_ranges", spec.initial_ranges, "ranges");
    read(r, "min_width_rps", spec.min_width_rps, "ranges");
    read(r, "split", spec.split, "ranges");
    read(r, "split_epsilon", spec.split_epsilon, "ranges");
    read(r, "split_window", spec.split_window, "ranges");
    read(r, "slope_ms_per_rps", spec.slope_ms_per_rps, "ranges");
    read(r, "learn_slope_steps", spec.learn_slope_steps, "ranges");
    if (!(spec.max_rps > spec.min_rps) || spec.initial_ranges == 0 || !(spec.min_width_rps > 0.0)) {
      throw ConfigError("ranges block out of range");
    }
    config.ranges = spec;
  }

  read(doc, "initial_utilization", config.initial_utilization, "config");
  if (!(config.initial_utilization > 0.0 && config.initial_utilization <= 1.0)) {
    throw ConfigError("initial_utilization must be in (0, 1]");
  }
  std::string out;
  read(doc, "output_dir", out, "config");
  if (!out.empty()) config.output_dir = out;
  read(doc, "seed", config.seed, "config");
  read(doc, "steps", config.steps, "config");
  read(doc, "sweep_seeds", config.sweep_seeds, "config");
  if (doc.contains("optm_cache_dir")) {
    std::string cache;
    read(doc, "optm_cache_dir", cache, "config");
    config.optm_cache_dir = resolve(base_dir, cache);
  }
  if (doc.contains("events")) {
    const json& events = doc.at("events");
    if (!events.is_array()) throw ConfigError("'events' must be an array");
    for (const auto& e : events) {
      reject_unknown(e, {"step", "demand_scale", "r_slo_ms"}, "event");
      Event event;
      if (!e.contains("step")) throw ConfigError("event needs a 'step'");
      read(e, "step", event.step, "event");
      if (e.contains("demand_scale")) {
        double scale = 1.0;
        read(e, "demand_scale", scale, "event");
        if (!(scale > 0.0)) throw ConfigError("demand_scale must be > 0");
        event.demand_scale = scale;
      }
      if (e.contains("r_slo_ms")) {
        double r = 0.0;
        read(e, "r_slo_ms", r, "event");
        if (!(r > 0.0)) throw ConfigError("event r_slo_ms must be > 0");
        event.r_slo_ms = r;
      }
      config.events.push_back(event);
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace pema::experiment
