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

#include "graphscore/manifest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "graphscore/common.h"
#include "graphscore/random.h"

namespace graphscore::study {

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["upstream"] = upstream;
  j["outputs"] = outputs;
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  Manifest m;
  m.stage = j.at("stage");
  m.config_hash = j.at("config_hash");
  m.seed = j.at("seed");
  m.upstream = j.at("upstream").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  return m;
}

std::string hex_digest(std::uint64_t h) { return fmt::format("{:016x}", h); }

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex_digest(fnv1a(buf.str()));
}

void write_manifest(const Manifest& m, const std::string& dir) {
  const auto path = (std::filesystem::path(dir) / kManifestFile).string();
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << m.to_json().dump(2) << '\n';
}

std::optional<Manifest> read_manifest(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / kManifestFile;
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  try {
    return Manifest::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest '" + path.string() + "': " + e.what());
  }
}

bool outputs_intact(const Manifest& m, const std::string& dir) {
  for (const auto& [name, digest] : m.outputs) {
    const auto path = std::filesystem::path(dir) / name;
    if (!std::filesystem::exists(path) || file_digest(path.string()) != digest) return false;
  }
  return true;
}

}  // namespace graphscore::study
