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

// Dynamics dataset collection, persistence and supervised training of the
// transition network.

#ifndef TUGCHECK_DYNAMICS_H_
#define TUGCHECK_DYNAMICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tugcheck/match.h"
#include "tugcheck/networks.h"
#include "tugcheck/pool.h"

namespace tugcheck {

// Each side of each episode is the random agent with probability
// `random_fraction`, otherwise a uniformly drawn pool member. Episode i is
// fully determined by (seed, i).
std::vector<TransitionRecord> CollectDynamicsDataset(const AgentPool& pool, int num_episodes,
                                                     double random_fraction,
                                                     const GameConfig& config,
                                                     std::uint64_t seed);

// Line-delimited JSON: a header line, then one record per line.
void SaveDataset(const std::vector<TransitionRecord>& records, const GameConfig& config,
                 const std::string& path);
std::vector<TransitionRecord> LoadDataset(const std::string& path);

struct DynamicsParams {
  int epochs = 40;
  int batch_size = 64;
  float learning_rate = 1e-3f;
  double holdout_fraction = 0.2;
  double reward_weight = 0.1;
  std::uint64_t seed = 1;
};

struct DynamicsReport {
  int train_size = 0;
  int holdout_size = 0;
  double final_train_loss = 0.0;
  // Held-out mean absolute error in raw units, per state feature.
  std::vector<double> attribute_mae;
  double health_mae = 0.0;
  double baseline_health_mae = 0.0;  // predicting s' = s
  double reward_mae = 0.0;
};

// Squared error on the state block, cross-entropy on the reward head.
// Throws DivergenceError on a non-finite loss.
TransitionNetwork TrainDynamics(const std::vector<TransitionRecord>& dataset,
                                const GameConfig& config, const DynamicsParams& params,
                                DynamicsReport* report = nullptr);

// Held-out evaluation of any transition network against recorded data.
DynamicsReport EvaluateDynamics(const TransitionNetwork& net,
                                const std::vector<TransitionRecord>& records,
                                const GameConfig& config);

}  // namespace tugcheck

#endif  // TUGCHECK_DYNAMICS_H_
