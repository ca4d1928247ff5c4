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

// Library of frozen opponents for self-play. Entries are only ever added.
//
// On disk a pool is a directory holding `pool.txt`:
//
//   tugcheck-pool 1
//   random random 0
//   gen1 gen1.weights 0.84
//
// (name, weights file or "random", recorded win rate) and the weight files.

#ifndef TUGCHECK_POOL_H_
#define TUGCHECK_POOL_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tugcheck/agents.h"
#include "tugcheck/networks.h"

namespace tugcheck {

struct PoolEntry {
  std::string name;
  std::optional<QNetwork> q;  // nullopt: uniform-random policy
  double win_rate = 0.0;
};

class AgentPool {
 public:
  // A pool seeded with the random-policy agent.
  static AgentPool WithRandomAgent();

  void Add(PoolEntry entry);
  size_t size() const { return entries_.size(); }
  const PoolEntry& entry(size_t i) const { return entries_.at(i); }
  const std::vector<PoolEntry>& entries() const { return entries_; }

  std::unique_ptr<Agent> MakeAgent(size_t i, const GameConfig& config) const;

  void Save(const std::string& dir) const;
  static AgentPool Load(const std::string& dir, const GameConfig& config);

 private:
  std::vector<PoolEntry> entries_;
};

}  // namespace tugcheck

#endif  // TUGCHECK_POOL_H_
