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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace graphscore::study {

// Record a stage leaves next to its outputs. Hashes are 16 hex digits of
// FNV-1a.
struct Manifest {
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
  // Config hash of every upstream stage the outputs were built from.
  std::map<std::string, std::string> upstream;
  // Output file name (relative to the stage directory) to content digest.
  std::map<std::string, std::string> outputs;

  nlohmann::ordered_json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

std::string hex_digest(std::uint64_t h);
std::string file_digest(const std::string& path);

inline constexpr const char* kManifestFile = "manifest.json";

void write_manifest(const Manifest& m, const std::string& dir);
// Nullopt when the directory has no manifest; throws Error when it is malformed.
std::optional<Manifest> read_manifest(const std::string& dir);

// Every recorded output exists with its recorded digest.
bool outputs_intact(const Manifest& m, const std::string& dir);

}  // namespace graphscore::study
