// Copyright 2026 The graphscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace graphscore {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using Period = int;

// Period label used by static networks and the rows derived from them.
inline constexpr Period kStaticPeriod = 0;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Base of every error raised by the library. The CLI maps ConfigError to exit
// code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Feature groups of the stacked model: node attributes, benchmark score, node
// statistics, ego-network aggregates and learned embeddings.
enum class FeatureGroup : std::uint8_t { A, B, C, D, E };

inline std::string_view to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::A: return "A";
    case FeatureGroup::B: return "B";
    case FeatureGroup::C: return "C";
    case FeatureGroup::D: return "D";
    case FeatureGroup::E: return "E";
  }
  return "?";
}

FeatureGroup feature_group_from_string(std::string_view s);

// (entity, period) key shared by attribute tables, feature frames and samples.
struct RowKey {
  std::string entity;
  Period period = kStaticPeriod;

  friend bool operator==(const RowKey&, const RowKey&) = default;
  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const noexcept {
    return std::hash<std::string>{}(k.entity) * 1000003u ^
           std::hash<int>{}(k.period);
  }
};

}  // namespace graphscore
