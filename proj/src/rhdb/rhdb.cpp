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

#include "pema/rhdb/rhdb.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

namespace pema::rhdb {
namespace {

constexpr std::string_view kMagic = "# pema-rhdb v1 services=";
constexpr std::string_view kFooter = "# end entries=";

void append_double(std::string& out, double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, end);
}

void append_cores(std::string& out, int quanta) {
  out += fmt::format("{}.{}", quanta / sim::kQuantaPerCore, quanta % sim::kQuantaPerCore);
}

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Field> split_fields(std::string_view line) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::size_t stop = comma == std::string_view::npos ? line.size() : comma;
    fields.push_back({line.substr(start, stop - start), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(const Field& field, std::size_t line) {
  T value{};
  const char* first = field.text.data();
  const char* last = first + field.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.text.empty()) {
    throw ParseError(line, field.column, fmt::format("malformed number '{}'", field.text));
  }
  return value;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(fmt::format("rhdb:{}:{}: {}", line, column, what)),
      line_(line),
      column_(column) {}

Rhdb::Rhdb(std::size_t services) : services_(services) {}

void Rhdb::insert(Entry entry) {
  if (entry.x.size() != services_ || entry.u_th.size() != services_ ||
      entry.h_th.size() != services_) {
    throw std::invalid_argument("rhdb entry does not match the service count");
  }
  if (!entries_.empty() && entry.t <= entries_.back().t) {
    throw std::invalid_argument(fmt::format("rhdb key {} is not after {}", entry.t, entries_.back().t));
  }
  totals_.push_back(entry.x.total_quanta());
  entries_.push_back(std::move(entry));
}

std::vector<std::size_t> Rhdb::eligible(Eligibility eligibility) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].violated) continue;
    bool stale = false;
    if (eligibility == Eligibility::kExcludeSuperseded) {
      for (std::size_t j = i + 1; j < entries_.size() && !stale; ++j) {
        stale = entries_[j].violated && entries_[i].x.dominated_by(entries_[j].x);
      }
    }
    if (!stale) out.push_back(i);
  }
  return out;
}

std::optional<Entry> Rhdb::min_resource_non_violating(Eligibility eligibility) const {
  std::optional<std::size_t> best;
  for (std::size_t i : eligible(eligibility)) {
    if (!best || totals_[i] <= totals_[*best]) best = i;
  }
  if (!best) return std::nullopt;
  return entries_[*best];
}

std::optional<Entry> Rhdb::random_non_violating(std::mt19937_64& rng,
                                                Eligibility eligibility) const {
  const auto candidates = eligible(eligibility);
  if (candidates.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return entries_[candidates[pick(rng)]];
}

void Rhdb::write(std::ostream& out) const {
  out << kMagic << services_ << '\n';
  out << "# t,lambda,r_ms,violated,x[0.." << services_ << "),u_th[0.." << services_
      << "),h_th[0.." << services_ << ")\n";
  std::string line;
  for (const auto& e : entries_) {
    line.clear();
    line += std::to_string(e.t);
    line += ',';
    append_double(line, e.lambda);
    line += ',';
    append_double(line, e.r_ms);
    line += e.violated ? ",1" : ",0";
    for (int q : e.x.raw()) {
      line += ',';
      append_cores(line, q);
    }
    for (double v : e.u_th) {
      line += ',';
      append_double(line, v);
    }
    for (double v : e.h_th) {
      line += ',';
      append_double(line, v);
    }
    out << line << '\n';
  }
  out << kFooter << entries_.size() << '\n';
}

Rhdb Rhdb::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, 1, "empty file");
  ++line_no;
  if (!line.starts_with(kMagic)) throw ParseError(line_no, 1, "missing rhdb header");
  const auto services = parse_number<std::size_t>(
      Field{std::string_view(line).substr(kMagic.size()), kMagic.size() + 1}, line_no);
  Rhdb db(services);
  const std::size_t expected_fields = 4 + 3 * services;

  bool saw_footer = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (saw_footer) {
      if (!view.empty()) throw ParseError(line_no, 1, "content after end marker");
      continue;
    }
    if (view.starts_with(kFooter)) {
      const auto count = parse_number<std::size_t>(
          Field{view.substr(kFooter.size()), kFooter.size() + 1}, line_no);
      if (count != db.size()) {
        throw ParseError(line_no, kFooter.size() + 1,
                         fmt::format("end marker says {} entries, read {}", count, db.size()));
      }
      saw_footer = true;
      continue;
    }
    if (view.starts_with("#")) continue;

    const auto fields = split_fields(view);
    if (fields.size() != expected_fields) {
      const std::size_t column = fields.size() < expected_fields ? view.size() + 1
                                                                : fields[expected_fields].column;
      throw ParseError(line_no, column,
                       fmt::format("expected {} fields, found {}", expected_fields, fields.size()));
    }
    Entry e;
    e.t = parse_number<std::int64_t>(fields[0], line_no);
    e.lambda = parse_number<double>(fields[1], line_no);
    e.r_ms = parse_number<double>(fields[2], line_no);
    const int flag = parse_number<int>(fields[3], line_no);
    if (flag != 0 && flag != 1) throw ParseError(line_no, fields[3].column, "violated must be 0 or 1");
    e.violated = flag == 1;
    std::vector<int> quanta;
    for (std::size_t i = 0; i < services; ++i) {
      const Field& f = fields[4 + i];
      const double cores = parse_number<double>(f, line_no);
      const double scaled = cores * sim::kQuantaPerCore;
      const double rounded = std::round(scaled);
      if (cores <= 0.0 || std::abs(scaled - rounded) > 1e-6) {
        throw ParseError(line_no, f.column, fmt::format("allocation '{}' is not a positive multiple of 0.1", f.text));
      }
      quanta.push_back(static_cast<int>(rounded));
    }
    e.x = sim::Allocation(std::move(quanta));
    for (std::size_t i = 0; i < services; ++i) {
      e.u_th.push_back(parse_number<double>(fields[4 + services + i], line_no));
    }
    for (std::size_t i = 0; i < services; ++i) {
      e.h_th.push_back(parse_number<double>(fields[4 + 2 * services + i], line_no));
    }
    try {
      db.insert(std::move(e));
    } catch (const std::invalid_argument& err) {
      throw ParseError(line_no, 1, err.what());
    }
  }
  if (!saw_footer) throw ParseError(line_no + 1, 1, "truncated file: missing end marker");
  return db;
}

void Rhdb::persist(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write(out);
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

Rhdb Rhdb::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read(in);
}

}  // namespace pema::rhdb
