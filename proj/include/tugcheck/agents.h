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

#ifndef TUGCHECK_AGENTS_H_
#define TUGCHECK_AGENTS_H_

#include <functional>
#include <memory>
#include <random>
#include <string>

#include "tugcheck/game.h"
#include "tugcheck/models.h"
#include "tugcheck/networks.h"
#include "tugcheck/planner.h"

namespace tugcheck {

class Agent {
 public:
  virtual ~Agent() = default;
  // Returns a legal action for `player` in a non-terminal state.
  virtual PurchaseAction Act(const AbstractState& s, Player player, std::mt19937_64& rng) = 0;
  virtual std::string Name() const = 0;
};

class RandomAgent : public Agent {
 public:
  explicit RandomAgent(GameConfig config) : config_(std::move(config)) {}
  PurchaseAction Act(const AbstractState& s, Player player, std::mt19937_64& rng) override;
  std::string Name() const override { return "random"; }

 private:
  GameConfig config_;
};

// Greedy in the player's scalar Q value (epsilon-greedy when epsilon > 0).
// The enemy side evaluates the player-reversed state.
class QAgent : public Agent {
 public:
  QAgent(QNetwork q, GameConfig config, double epsilon = 0.0, std::string name = "q");
  PurchaseAction Act(const AbstractState& s, Player player, std::mt19937_64& rng) override;
  std::string Name() const override { return name_; }
  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  const QNetwork& q() const { return q_; }

 private:
  QNetwork q_;
  GameConfig config_;
  double epsilon_;
  std::string name_;
};

// Plans with a model bundle at every decision point. As the enemy it plans
// on the player-reversed state. Each finished tree is handed to the sink.
class PlannerAgent : public Agent {
 public:
  using TreeSink = std::function<void(const SearchTree& tree, Player player)>;
  PlannerAgent(ModelBundle bundle, PruneWidths widths = {}, TreeSink sink = {});
  PurchaseAction Act(const AbstractState& s, Player player, std::mt19937_64& rng) override;
  std::string Name() const override { return "planner"; }

 private:
  ModelBundle bundle_;
  PruneWidths widths_;
  TreeSink sink_;
};

}  // namespace tugcheck

#endif  // TUGCHECK_AGENTS_H_
