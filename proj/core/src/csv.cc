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

#include "graphscore/csv.h"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "graphscore/common.h"

namespace graphscore {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw Error("cannot open '" + path + "'");
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (trim(buffer_).empty()) continue;
    std::string_view h = buffer_;
    // UTF-8 byte order mark.
    if (h.size() >= 3 && h.substr(0, 3) == "\xEF\xBB\xBF") h.remove_prefix(3);
    for (auto f : split_fields(h)) header_.emplace_back(f);
    return;
  }
  throw EmptyInputError("'" + path + "' is empty");
}

std::optional<std::size_t> CsvReader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  return std::nullopt;
}

std::size_t CsvReader::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw ParseError(path_, 1, "missing required column '" + std::string(name) + "'");
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (trim(buffer_).empty()) continue;
    fields = split_fields(buffer_);
    if (fields.size() != header_.size())
      fail("expected " + std::to_string(header_.size()) + " fields, found " +
           std::to_string(fields.size()));
    return true;
  }
  return false;
}

void CsvReader::fail(const std::string& what) const {
  throw ParseError(path_, line_, what);
}

double CsvReader::parse_double(std::string_view field,
                               std::string_view column) const {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    fail("column '" + std::string(column) + "': not a number: '" +
         std::string(field) + "'");
  return v;
}

double CsvReader::parse_optional_double(std::string_view field,
                                        std::string_view column) const {
  if (field.empty() || field == "NA" || field == "nan" || field == "NaN")
    return kMissing;
  return parse_double(field, column);
}

int CsvReader::parse_int(std::string_view field, std::string_view column) const {
  int v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    fail("column '" + std::string(column) + "': not an integer: '" +
         std::string(field) + "'");
  return v;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw Error("cannot write '" + path + "'");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error("failed writing '" + path_ + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  return fmt::format("{}", v);
}

}  // namespace graphscore
