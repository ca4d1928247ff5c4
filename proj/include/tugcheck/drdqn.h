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

// Decomposed-reward DQN: one sigmoid output per destroy condition, each
// regressed on its own reward component with a shared greedy bootstrap
// action.

#ifndef TUGCHECK_DRDQN_H_
#define TUGCHECK_DRDQN_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "tugcheck/networks.h"
#include "tugcheck/pool.h"

namespace tugcheck {

struct DrdqnParams {
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // of the episode budget
  int replay_capacity = 100000;
  int batch_size = 64;
  int target_sync_updates = 1000;
  float learning_rate = 1e-3f;
  int learn_every = 4;  // environment steps per gradient update
  int warmup_steps = 256;
  double stop_win_rate = 0.8;
  int eval_games = 50;
  int eval_every = 250;  // episodes
  bool flip_augmentation = true;
  std::uint64_t seed = 1;
};

// One learner-perspective experience.
struct Experience {
  AbstractState s;
  PurchaseAction a;
  RewardVector reward{};
  AbstractState s_next;
  bool terminal = false;
};

// Per-component regression targets r_i + gamma * Q_i(s', a*) where a* is
// the target net's best action at s' by friendly scalar value. Terminal
// experiences get r exactly.
std::vector<QVector> TdTargets(const QNetwork& target, const std::vector<const Experience*>& batch,
                               double gamma, const GameConfig& config);

struct DrdqnResult {
  QNetwork q;
  int episodes = 0;
  long updates = 0;
  double last_win_rate = 0.0;  // vs pool at the last evaluation
  bool reached_stop_win_rate = false;
};

// Trains against opponents sampled uniformly from `pool`. Progress rows
// (CSV with header) go to `progress` when given. Throws DivergenceError.
DrdqnResult TrainDrdqn(const AgentPool& pool, const GameConfig& config, int budget_episodes,
                       const DrdqnParams& params, std::ostream* progress = nullptr);

// Learner win rate against uniformly sampled pool members.
double EvaluateAgainstPool(const QNetwork& q, const AgentPool& pool, const GameConfig& config,
                           int games, std::uint64_t seed);

}  // namespace tugcheck

#endif  // TUGCHECK_DRDQN_H_
