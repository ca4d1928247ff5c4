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


// Canonical attribute names for stored states, actions and win
// probabilities. State attributes are ordered health, buildings, per-grid
// units, currency, wave; the same order the feature encoder uses.

#ifndef TUGCHECK_SCHEMA_H_
#define TUGCHECK_SCHEMA_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tugcheck/game.h"

namespace tugcheck {

inline constexpr int kNumStateAttributes =
    kNumPlayers * kNumLanes * (1 + kNumUnitTypes + kNumUnitTypes * kNumGrids) + kNumPlayers + 1;
inline constexpr int kNumWinProbAttributes = 4;
inline constexpr int kNumActionAttributes = 2 * (kNumUnitTypes + 1);

using StateAttributes = std::array<int, kNumStateAttributes>;

// e.g. friendlyHealthTop, enemyMarineBldgsBottom, friendlyImmortalTopGrid3,
// enemyCurrency, wave.
const std::vector<std::string>& StateAttributeNames();
std::optional<int> FindStateAttribute(std::string_view name);
StateAttributes Flatten(const AbstractState& s);
AbstractState Unflatten(const StateAttributes& a);

// Canonical: probabilityOfWinInTopLane, probabilityOfWinInBottomLane,
// probabilityOfEnemyWinInTopLane, probabilityOfEnemyWinInBottomLane, in
// win-condition order.
const std::vector<std::string>& WinProbAttributeNames();
// Alternative spelling per component (probabilityOfDestroyingEnemyTopBase...).
const std::vector<std::string>& WinProbAttributeAliases();
std::optional<int> FindWinProbAttribute(std::string_view name);

// numOf<Unit>BldgsPurchasedBy<Player> for each unit, then laneOf<Player>
// (0 top, 1 bottom); friendly block first.
const std::vector<std::string>& ActionAttributeNames();
std::optional<int> FindActionAttribute(std::string_view name);
std::array<int, kNumActionAttributes> FlattenAction(const ActionPair& a);
ActionPair UnflattenAction(const std::array<int, kNumActionAttributes>& a);

}  // namespace tugcheck

#endif  // TUGCHECK_SCHEMA_H_
