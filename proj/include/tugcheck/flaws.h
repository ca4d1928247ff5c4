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

// Named, parameterized perturbations applied after a model's prediction.
// Every perturbation is a deterministic function of the model inputs and
// the flaw seed, so a flawed bundle is still a pure function.
//
// File format (same key-value syntax as game configs):
//
//   base = exact
//   seed = 7
//   healthInflation = lane:top player:enemy amount:10 probability:0.3
//   phantomUnits = unit:immortal count:1            # optional lane:, player:
//   asymmetryNoise = scale:2
//   winProbLeak = epsilon:0.05
//   ranker = inverted

#ifndef TUGCHECK_FLAWS_H_
#define TUGCHECK_FLAWS_H_

#include <optional>
#include <string>

#include "tugcheck/game.h"
#include "tugcheck/kv_config.h"
#include "tugcheck/networks.h"

namespace tugcheck {

struct HealthInflation {
  Lane lane = Lane::kTop;
  Player player = Player::kEnemy;
  int amount = 10;
  double probability = 1.0;
};

struct PhantomUnits {
  UnitType unit = UnitType::kImmortal;
  int count = 1;
  Lane lane = Lane::kTop;
  Player player = Player::kFriendly;
};

// Adds a pseudo-random offset in [-scale, scale] to every non-zero predicted
// unit count. The offset hashes the raw inputs, so transformed inputs get
// unrelated noise.
struct AsymmetryNoise {
  int scale = 1;
};

// Adds epsilon to every win-probability component (clamped to 1).
struct WinProbLeak {
  double epsilon = 0.05;
};

struct FlawSpec {
  std::optional<HealthInflation> health_inflation;
  std::optional<PhantomUnits> phantom_units;
  std::optional<AsymmetryNoise> asymmetry_noise;
  std::optional<WinProbLeak> win_prob_leak;
  bool invert_ranker = false;
  std::uint64_t seed = 0;

  bool Empty() const {
    return !health_inflation && !phantom_units && !asymmetry_noise && !win_prob_leak &&
           !invert_ranker;
  }
  bool AffectsTransitions() const {
    return health_inflation || phantom_units || asymmetry_noise;
  }

  static FlawSpec FromKeyValue(const KeyValueConfig& kv);
  KeyValueConfig ToKeyValue() const;
  std::string Describe() const;
};

// Perturbs a predicted next state in place.
void ApplyTransitionFlaws(const FlawSpec& spec, const AbstractState& input,
                          const ActionPair& actions, AbstractState* predicted);
void ApplyValueFlaws(const FlawSpec& spec, QVector* value);

}  // namespace tugcheck

#endif  // TUGCHECK_FLAWS_H_
