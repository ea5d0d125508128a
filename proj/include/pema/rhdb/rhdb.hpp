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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pema/sim/allocation.hpp"

namespace pema::rhdb {

// Raised by `Rhdb::read`/`Rhdb::load` with a 1-based line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Entry {
  std::int64_t t = 0;
  double lambda = 0.0;
  double r_ms = 0.0;
  bool violated = false;  // r_ms exceeded the target in force when recorded
  sim::Allocation x;
  std::vector<double> u_th;
  std::vector<double> h_th;

  bool operator==(const Entry&) const = default;
};

// Which entries count as safe rollback/exploration candidates.
enum class Eligibility {
  // Every entry recorded without a violation.
  kRecordedFlag,
  // Additionally drops entries whose allocation is componentwise <= the
  // allocation of some later violating entry. Under monotone latency such
  // entries would violate too, so they are stale after a demand or SLO change.
  kExcludeSuperseded,
};

// Append-only allocation history of one controller.
class Rhdb {
 public:
  explicit Rhdb(std::size_t services);

  // Throws std::invalid_argument on a non-increasing t or a size mismatch.
  void insert(Entry entry);

  std::size_t services() const { return services_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& at(std::size_t i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const { return entries_; }
  int total_quanta(std::size_t i) const { return totals_.at(i); }

  // Smallest-total eligible entry; ties go to the most recent.
  std::optional<Entry> min_resource_non_violating(
      Eligibility eligibility = Eligibility::kRecordedFlag) const;
  // Uniform draw over the eligible entries.
  std::optional<Entry> random_non_violating(
      std::mt19937_64& rng, Eligibility eligibility = Eligibility::kRecordedFlag) const;

  void write(std::ostream& out) const;
  static Rhdb read(std::istream& in);
  void persist(const std::filesystem::path& path) const;
  static Rhdb load(const std::filesystem::path& path);

  bool operator==(const Rhdb& other) const {
    return services_ == other.services_ && entries_ == other.entries_;
  }

 private:
  std::vector<std::size_t> eligible(Eligibility eligibility) const;

  std::size_t services_;
  std::vector<Entry> entries_;
  std::vector<int> totals_;
};

}  // namespace pema::rhdb
