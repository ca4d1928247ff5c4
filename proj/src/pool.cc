// Copyright 2026 The tugcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tugcheck/pool.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tugcheck/common.h"

namespace tugcheck {

namespace fs = std::filesystem;

AgentPool AgentPool::WithRandomAgent() {
  AgentPool pool;
  pool.Add({"random", std::nullopt, 0.0});
  return pool;
}

void AgentPool::Add(PoolEntry entry) {
  for (const auto& e : entries_) {
    if (e.name == entry.name) throw ConfigError("duplicate pool entry '" + entry.name + "'");
  }
  if (entry.name.empty() || entry.name.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError("pool entry names must be non-empty and contain no whitespace");
  }
  entries_.push_back(std::move(entry));
}

std::unique_ptr<Agent> AgentPool::MakeAgent(size_t i, const GameConfig& config) const {
  const PoolEntry& e = entry(i);
  if (!e.q) return std::make_unique<RandomAgent>(config);
  return std::make_unique<QAgent>(*e.q, config, 0.0, e.name);
}

void AgentPool::Save(const std::string& dir) const {
  fs::create_directories(dir);
  std::ofstream manifest(fs::path(dir) / "pool.txt");
  if (!manifest) throw Error("cannot write pool manifest in " + dir);
  manifest << "tugcheck-pool 1\n";
  for (const auto& e : entries_) {
    std::string file = "random";
    if (e.q) {
      file = e.name + ".weights";
      e.q->Save((fs::path(dir) / file).string());
    }
    manifest << e.name << ' ' << file << ' ' << e.win_rate << '\n';
  }
}

AgentPool AgentPool::Load(const std::string& dir, const GameConfig& config) {
  std::ifstream in(fs::path(dir) / "pool.txt");
  if (!in) throw NotFoundError("no pool manifest in " + dir);
  std::string line;
  if (!std::getline(in, line) || line != "tugcheck-pool 1") {
    throw FormatError("bad pool manifest header in " + dir);
  }
  AgentPool pool;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    PoolEntry e;
    std::string file;
    if (!(fields >> e.name >> file >> e.win_rate)) {
      throw FormatError("bad pool manifest line: " + line);
    }
    if (file != "random") e.q = QNetwork::Load((fs::path(dir) / file).string(), config);
    pool.Add(std::move(e));
  }
  return pool;
}

}  // namespace tugcheck
