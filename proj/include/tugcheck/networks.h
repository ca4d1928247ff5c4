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

#ifndef TUGCHECK_NETWORKS_H_
#define TUGCHECK_NETWORKS_H_

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tugcheck/features.h"
#include "tugcheck/game.h"
#include "tugcheck/mlp.h"

namespace tugcheck {

// Four win-condition probabilities ordered (friendly destroys enemy top,
// friendly destroys enemy bottom, enemy destroys friendly top, enemy
// destroys friendly bottom), the same order as Outcome::reward.
using QVector = std::array<double, 4>;

inline constexpr int kQInputSize = kStateFeatureSize + kActionFeatureSize;
inline constexpr int kTransitionInputSize = kStateFeatureSize + 2 * kActionFeatureSize;
inline constexpr int kTransitionOutputSize = kStateFeatureSize + 4;
inline const std::vector<int> kHiddenWidths = {256, 128, 64};

float Sigmoid(float x);

// Action-value network, friendly perspective: (state, friendly action) ->
// sigmoid 4-vector.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(Mlp net, GameConfig config);
  static QNetwork Random(const GameConfig& config, std::mt19937_64& rng);

  // One column per action.
  Matrix Inputs(const AbstractState& s, std::span<const PurchaseAction> actions) const;
  std::vector<QVector> Evaluate(const AbstractState& s,
                                std::span<const PurchaseAction> actions) const;

  Mlp& mlp() { return net_; }
  const Mlp& mlp() const { return net_; }
  const GameConfig& config() const { return config_; }

  void Save(const std::string& path) const;
  static QNetwork Load(const std::string& path, const GameConfig& config);

 private:
  Mlp net_;
  GameConfig config_;
};

// Dynamics network: (state, friendly action, enemy action) -> next state and
// reward. The state head is residual: raw output passes through tanh and is
// added to the scaled input features. The reward head is a sigmoid.
class TransitionNetwork {
 public:
  TransitionNetwork() = default;
  TransitionNetwork(Mlp net, GameConfig config);
  static TransitionNetwork Random(const GameConfig& config, std::mt19937_64& rng);

  static void Inputs(const AbstractState& s, const ActionPair& a, const GameConfig& config,
                     std::span<float> out);
  // Raw network outputs -> scaled next-state features and reward.
  void Heads(std::span<const float> input, std::span<const float> raw,
             std::span<float> next_features, RewardVector* reward) const;

  struct Prediction {
    AbstractState state;
    RewardVector reward{};
  };
  Prediction Predict(const AbstractState& s, const ActionPair& a) const;

  Mlp& mlp() { return net_; }
  const Mlp& mlp() const { return net_; }
  const GameConfig& config() const { return config_; }

  void Save(const std::string& path) const;
  static TransitionNetwork Load(const std::string& path, const GameConfig& config);

 private:
  Mlp net_;
  GameConfig config_;
};

// Direct state-value network: state -> sigmoid 4-vector.
class ValueNetwork {
 public:
  ValueNetwork() = default;
  ValueNetwork(Mlp net, GameConfig config);
  static ValueNetwork Random(const GameConfig& config, std::mt19937_64& rng);
  QVector Evaluate(const AbstractState& s) const;
  const Mlp& mlp() const { return net_; }
  void Save(const std::string& path) const;
  static ValueNetwork Load(const std::string& path, const GameConfig& config);

 private:
  Mlp net_;
  GameConfig config_;
};

}  // namespace tugcheck

#endif  // TUGCHECK_NETWORKS_H_
