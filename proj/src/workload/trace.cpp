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

#include "pema/workload/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace pema::workload {
namespace {

bool parse_double(std::string_view text, double& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ',' || std::isspace(static_cast<unsigned char>(line[i])))) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ',' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

Trace::Trace(std::vector<TracePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw TraceError("trace is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].timestamp_s) || !(points_[i].rps >= 0.0)) {
      throw TraceError(fmt::format("trace point {} is invalid", i));
    }
    if (i > 0 && points_[i].timestamp_s < points_[i - 1].timestamp_s) {
      throw TraceError(fmt::format("trace timestamps decrease at point {}", i));
    }
  }
}

Trace Trace::parse(std::string_view text) {
  std::vector<TracePoint> points;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool seen_data = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = tokens(line);
    if (fields.empty() || fields.front().starts_with("#")) continue;
    double ts = 0.0;
    double rps = 0.0;
    const bool numeric = fields.size() == 2 && parse_double(fields[0], ts) && parse_double(fields[1], rps);
    if (!numeric) {
      if (!seen_data && points.empty() && fields.size() == 2) {
        seen_data = true;  // header row
        continue;
      }
      throw TraceError(fmt::format("trace line {}: expected '<epoch_seconds>,<rps>'", line_no));
    }
    seen_data = true;
    points.push_back({ts, rps});
  }
  return Trace(std::move(points));
}

Trace Trace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError(fmt::format("cannot open trace '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const TraceError& e) {
    throw TraceError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double Trace::max_rps() const {
  return std::max_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.rps < b.rps; })
      ->rps;
}

double Trace::min_rps() const {
  return std::min_element(points_.begin(), points_.end(),
                          [](const auto& a, const auto& b) { return a.rps < b.rps; })
      ->rps;
}

std::vector<double> replay(const Trace& trace, double interval_s, std::size_t steps) {
  if (!(interval_s > 0.0)) throw TraceError("interval must be positive");
  const auto& pts = trace.points();
  const double start = pts.front().timestamp_s;
  if (steps == 0) {
    steps = static_cast<std::size_t>(std::floor((pts.back().timestamp_s - start) / interval_s)) + 1;
  }
  std::vector<double> out;
  out.reserve(steps);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double at = start + static_cast<double>(k) * interval_s;
    while (cursor + 1 < pts.size() && pts[cursor + 1].timestamp_s <= at) ++cursor;
    out.push_back(pts[cursor].rps);
  }
  return out;
}

}  // namespace pema::workload
