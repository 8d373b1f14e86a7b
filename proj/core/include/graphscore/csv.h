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

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graphscore {

// Minimal reader for the comma-separated, unquoted files this project
// exchanges. Blank lines are skipped; errors carry the 1-based line number.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  std::optional<std::size_t> column(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;

  // Reads the next data row. Returns false at end of file.
  bool next(std::vector<std::string_view>& fields);

  std::size_t line() const { return line_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const;

  double parse_double(std::string_view field, std::string_view column) const;
  // Empty fields map to NaN.
  double parse_optional_double(std::string_view field,
                               std::string_view column) const;
  int parse_int(std::string_view field, std::string_view column) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::string buffer_;
  std::vector<std::string> header_;
  std::size_t line_ = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

// Shortest round-trip decimal representation; NaN is written as an empty field.
std::string format_number(double v);

std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace graphscore
