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

#include "pema/sim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace pema::sim {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) {
      throw ScenarioError(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
T required(const json& object, const char* key, std::string_view where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ScenarioError(fmt::format("missing key '{}' in {}", key, where));
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(fmt::format("bad value for '{}' in {}: {}", key, where, e.what()));
  }
}

template <typename T>
T optional(const json& object, const char* key, T fallback, std::string_view where) {
  if (!object.contains(key)) return fallback;
  return required<T>(object, key, where);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

std::string_view to_string(CallMode mode) {
  return mode == CallMode::kParallel ? "parallel" : "sequential";
}

CallMode call_mode_from_string(std::string_view text) {
  if (text == "sequential") return CallMode::kSequential;
  if (text == "parallel") return CallMode::kParallel;
  throw ScenarioError(fmt::format("unknown call mode '{}'", text));
}

Scenario::Scenario(std::vector<ServiceSpec> services, std::vector<CallGroup> calls,
                   std::size_t root, double noise_sigma, std::uint64_t rng_seed)
    : services_(std::move(services)),
      calls_(std::move(calls)),
      root_(root),
      noise_sigma_(noise_sigma),
      rng_seed_(rng_seed) {
  validate_and_index();
}

void Scenario::validate_and_index() {
  const std::size_t n = services_.size();
  if (n == 0) throw ScenarioError("scenario needs at least one service");
  if (root_ >= n) throw ScenarioError("root index out of range");
  if (!(noise_sigma_ >= 0.0)) throw ScenarioError("noise_sigma must be >= 0");

  std::set<std::string> names;
  for (const auto& s : services_) {
    if (!names.insert(s.name).second) {
      throw ScenarioError(fmt::format("duplicate service name '{}'", s.name));
    }
    if (!(s.demand_s > 0.0)) throw ScenarioError(fmt::format("{}: demand must be > 0", s.name));
    if (!(s.base_latency_ms >= 0.0)) {
      throw ScenarioError(fmt::format("{}: base_latency_ms must be >= 0", s.name));
    }
    if (!(s.visit_ratio >= 0.0)) throw ScenarioError(fmt::format("{}: visit_ratio must be >= 0", s.name));
    if (!(s.throttle_knee > 0.0 && s.throttle_knee < 1.0)) {
      throw ScenarioError(fmt::format("{}: throttle_knee must be in (0, 1)", s.name));
    }
    if (!(s.throttle_gain > 0.0)) throw ScenarioError(fmt::format("{}: throttle_gain must be > 0", s.name));
  }

  groups_by_parent_.assign(n, {});
  for (std::size_t g = 0; g < calls_.size(); ++g) {
    const auto& group = calls_[g];
    if (group.parent >= n) throw ScenarioError("call group parent out of range");
    if (group.children.empty()) throw ScenarioError("call group without children");
    for (std::size_t c : group.children) {
      if (c >= n) throw ScenarioError("call group child out of range");
      if (c == group.parent) {
        throw ScenarioError(fmt::format("{} calls itself", services_[c].name));
      }
    }
    groups_by_parent_[group.parent].push_back(g);
  }

  // Iterative DFS with colors; also yields the post-order used for evaluation.
  enum class Mark { kWhite, kGrey, kBlack };
  std::vector<Mark> mark(n, Mark::kWhite);
  bottom_up_.clear();
  struct Frame {
    std::size_t node;
    std::size_t next_edge;
  };
  auto children_of = [&](std::size_t node) {
    std::vector<std::size_t> out;
    for (std::size_t g : groups_by_parent_[node]) {
      out.insert(out.end(), calls_[g].children.begin(), calls_[g].children.end());
    }
    return out;
  };
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) adjacency[i] = children_of(i);

  std::vector<Frame> stack{{root_, 0}};
  mark[root_] = Mark::kGrey;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_edge < adjacency[top.node].size()) {
      std::size_t child = adjacency[top.node][top.next_edge++];
      if (mark[child] == Mark::kGrey) {
        throw ScenarioError(fmt::format("call graph has a cycle through '{}'", services_[child].name));
      }
      if (mark[child] == Mark::kWhite) {
        mark[child] = Mark::kGrey;
        stack.push_back({child, 0});
      }
    } else {
      mark[top.node] = Mark::kBlack;
      bottom_up_.push_back(top.node);
      stack.pop_back();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i] != Mark::kBlack) {
      throw ScenarioError(fmt::format("service '{}' is not reachable from the root", services_[i].name));
    }
  }
}

std::size_t Scenario::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    if (services_[i].name == name) return i;
  }
  throw ScenarioError(fmt::format("unknown service '{}'", name));
}

Scenario Scenario::with_noise(double sigma) const {
  Scenario copy = *this;
  if (!(sigma >= 0.0)) throw ScenarioError("noise_sigma must be >= 0");
  copy.noise_sigma_ = sigma;
  return copy;
}

Scenario Scenario::with_seed(std::uint64_t seed) const {
  Scenario copy = *this;
  copy.rng_seed_ = seed;
  return copy;
}

Scenario Scenario::with_demand_scale(double factor) const {
  if (!(factor > 0.0)) throw ScenarioError("demand scale must be > 0");
  Scenario copy = *this;
  for (auto& s : copy.services_) s.demand_s *= factor;
  return copy;
}

std::uint64_t Scenario::digest() const { return fnv1a(dump_scenario(*this)); }

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(fmt::format("scenario is not valid JSON (byte {}): {}", e.byte, e.what()));
  }
  if (!doc.is_object()) throw ScenarioError("scenario document must be an object");
  reject_unknown_keys(doc, {"services", "edges", "root", "noise_sigma", "seed"}, "scenario");

  const json& services_json = doc.at("services");
  if (!services_json.is_array()) throw ScenarioError("'services' must be an array");
  std::vector<ServiceSpec> services;
  for (const auto& entry : services_json) {
    if (!entry.is_object()) throw ScenarioError("service entries must be objects");
    reject_unknown_keys(entry,
                        {"name", "demand", "base_latency_ms", "visit_ratio", "throttle_knee",
                         "throttle_gain"},
                        "service");
    ServiceSpec s;
    s.name = required<std::string>(entry, "name", "service");
    s.demand_s = required<double>(entry, "demand", s.name);
    s.base_latency_ms = required<double>(entry, "base_latency_ms", s.name);
    s.visit_ratio = optional<double>(entry, "visit_ratio", 1.0, s.name);
    s.throttle_knee = optional<double>(entry, "throttle_knee", 0.8, s.name);
    s.throttle_gain = optional<double>(entry, "throttle_gain", 1.0, s.name);
    services.push_back(std::move(s));
  }

  auto lookup = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < services.size(); ++i) {
      if (services[i].name == name) return i;
    }
    throw ScenarioError(fmt::format("edge refers to unknown service '{}'", name));
  };

  std::vector<CallGroup> calls;
  if (doc.contains("edges")) {
    const json& edges = doc.at("edges");
    if (!edges.is_array()) throw ScenarioError("'edges' must be an array");
    for (const auto& entry : edges) {
      if (!entry.is_object()) throw ScenarioError("edge entries must be objects");
      reject_unknown_keys(entry, {"parent", "children", "mode"}, "edge");
      CallGroup group;
      group.parent = lookup(required<std::string>(entry, "parent", "edge"));
      for (const auto& child : required<std::vector<std::string>>(entry, "children", "edge")) {
        group.children.push_back(lookup(child));
      }
      group.mode = call_mode_from_string(optional<std::string>(entry, "mode", "sequential", "edge"));
      calls.push_back(std::move(group));
    }
  }

  const std::size_t root = lookup(required<std::string>(doc, "root", "scenario"));
  const double sigma = optional<double>(doc, "noise_sigma", kDefaultNoiseSigma, "scenario");
  const auto seed = optional<std::uint64_t>(doc, "seed", 0, "scenario");
  return Scenario(std::move(services), std::move(calls), root, sigma, seed);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump_scenario(const Scenario& scenario) {
  json doc;
  json services = json::array();
  for (const auto& s : scenario.services()) {
    services.push_back({{"name", s.name},
                        {"demand", s.demand_s},
                        {"base_latency_ms", s.base_latency_ms},
                        {"visit_ratio", s.visit_ratio},
                        {"throttle_knee", s.throttle_knee},
                        {"throttle_gain", s.throttle_gain}});
  }
  json edges = json::array();
  for (const auto& group : scenario.calls()) {
    json children = json::array();
    for (std::size_t c : group.children) children.push_back(scenario.service(c).name);
    edges.push_back({{"parent", scenario.service(group.parent).name},
                     {"children", std::move(children)},
                     {"mode", std::string(to_string(group.mode))}});
  }
  doc["services"] = std::move(services);
  doc["edges"] = std::move(edges);
  doc["root"] = scenario.service(scenario.root()).name;
  doc["noise_sigma"] = scenario.noise_sigma();
  doc["seed"] = scenario.rng_seed();
  return doc.dump(2);
}

}  // namespace pema::sim
