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

// Tug-of-War abstraction: two players, two lanes, four grid cells per lane,
// three unit types in a rock-paper-scissors damage relation. Players only
// choose what to purchase before each wave; units walk and fight on their own.

#ifndef TUGCHECK_GAME_H_
#define TUGCHECK_GAME_H_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tugcheck/common.h"
#include "tugcheck/kv_config.h"

namespace tugcheck {

enum class Player : std::uint8_t { kFriendly = 0, kEnemy = 1 };
enum class Lane : std::uint8_t { kTop = 0, kBottom = 1 };
enum class UnitType : std::uint8_t { kMarine = 0, kBaneling = 1, kImmortal = 2 };

inline constexpr int kNumPlayers = 2;
inline constexpr int kNumLanes = 2;
inline constexpr int kNumUnitTypes = 3;
inline constexpr int kNumGrids = 4;
inline constexpr int kMaxBaseHealth = 2000;
inline constexpr int kMaxWaves = 40;

inline constexpr Player kPlayers[] = {Player::kFriendly, Player::kEnemy};
inline constexpr Lane kLanes[] = {Lane::kTop, Lane::kBottom};
inline constexpr UnitType kUnitTypes[] = {UnitType::kMarine, UnitType::kBaneling,
                                          UnitType::kImmortal};

constexpr int Idx(Player p) { return static_cast<int>(p); }
constexpr int Idx(Lane l) { return static_cast<int>(l); }
constexpr int Idx(UnitType u) { return static_cast<int>(u); }
constexpr Player Opponent(Player p) {
  return p == Player::kFriendly ? Player::kEnemy : Player::kFriendly;
}
constexpr Lane OtherLane(Lane l) {
  return l == Lane::kTop ? Lane::kBottom : Lane::kTop;
}

const char* PlayerName(Player p);  // "friendly" / "enemy"
const char* LaneName(Lane l);      // "top" / "bottom"
const char* UnitName(UnitType u);  // "marine" / "baneling" / "immortal"
Lane ParseLane(const std::string& s);
Player ParsePlayer(const std::string& s);
UnitType ParseUnitType(const std::string& s);

template <typename T>
using PerLane = std::array<T, kNumLanes>;
template <typename T>
using PerPlayer = std::array<T, kNumPlayers>;
template <typename T>
using PerUnit = std::array<T, kNumUnitTypes>;
using GridCounts = std::array<int, kNumGrids>;

// Full interpretable snapshot of a game between waves. Grid index 0 is the
// cell nearest the friendly base and index 3 the cell nearest the enemy
// base, in both lanes.
struct AbstractState {
  PerPlayer<PerLane<int>> health{};
  PerPlayer<PerLane<PerUnit<int>>> buildings{};
  PerPlayer<PerLane<PerUnit<GridCounts>>> units{};
  PerPlayer<int> currency{};
  int wave_index = 0;

  int& Health(Player p, Lane l) { return health[Idx(p)][Idx(l)]; }
  int Health(Player p, Lane l) const { return health[Idx(p)][Idx(l)]; }
  int& Buildings(Player p, Lane l, UnitType u) {
    return buildings[Idx(p)][Idx(l)][Idx(u)];
  }
  int Buildings(Player p, Lane l, UnitType u) const {
    return buildings[Idx(p)][Idx(l)][Idx(u)];
  }
  // grid is 1-based to match attribute naming (Grid1..Grid4).
  int& Units(Player p, Lane l, UnitType u, int grid) {
    return units[Idx(p)][Idx(l)][Idx(u)][grid - 1];
  }
  int Units(Player p, Lane l, UnitType u, int grid) const {
    return units[Idx(p)][Idx(l)][Idx(u)][grid - 1];
  }
  int& Currency(Player p) { return currency[Idx(p)]; }
  int Currency(Player p) const { return currency[Idx(p)]; }

  bool operator==(const AbstractState&) const = default;
};

// One player's spending decision for the coming wave. All purchased
// buildings go into `lane`. An empty purchase is canonically in the top lane.
struct PurchaseAction {
  Lane lane = Lane::kTop;
  PerUnit<int> purchases{};

  bool IsEmpty() const { return purchases[0] == 0 && purchases[1] == 0 && purchases[2] == 0; }
  bool operator==(const PurchaseAction&) const = default;
};

PurchaseAction EmptyAction();
std::string ToString(const PurchaseAction& a);

struct ActionPair {
  PurchaseAction friendly;
  PurchaseAction enemy;
  bool operator==(const ActionPair&) const = default;
};

struct GameConfig {
  PerUnit<int> unit_cost{50, 75, 200};
  PerUnit<int> unit_hp{50, 40, 200};
  // damage[attacker][defender] per attacking unit per tick.
  PerUnit<PerUnit<int>> damage{{{4, 2, 12}, {15, 4, 3}, {4, 16, 5}}};
  PerUnit<int> base_damage{3, 5, 8};
  PerUnit<int> ticks_per_cell{10, 10, 10};
  int income_per_wave = 100;
  int starting_currency = 200;
  int ticks_per_wave = 30;
  int base_health = kMaxBaseHealth;
  int max_waves = kMaxWaves;
  int action_cap = 2000;
  double damage_jitter_fraction = 0.2;
  std::uint64_t rng_seed = 1;
  bool deterministic_mode = false;

  // Throws ConfigError when an invariant is violated.
  void Validate() const;
  // Shrunken variant used for fast matches: 200 HP bases, 10 waves.
  static GameConfig Shrunken();
  static GameConfig FromKeyValue(const KeyValueConfig& kv);
  static GameConfig Load(const std::string& path);
  KeyValueConfig ToKeyValue() const;
  // Stable content hash of every field that affects dynamics.
  std::uint64_t Hash() const;
  // Copy with jitter disabled.
  GameConfig Deterministic() const;
};

enum class WinCondition : std::uint8_t {
  kFriendlyDestroysEnemyTop = 0,
  kFriendlyDestroysEnemyBottom = 1,
  kEnemyDestroysFriendlyTop = 2,
  kEnemyDestroysFriendlyBottom = 3,
  kTimeoutLowestHealth = 4,
  // Both players lost a base during the same wave; settled like a timeout.
  kMutualDestruction = 5,
};

using RewardVector = std::array<double, 4>;

struct Outcome {
  Player winner = Player::kEnemy;
  WinCondition condition = WinCondition::kTimeoutLowestHealth;
  // One-hot over the four destroy conditions when the game ended by a
  // single-sided base destruction, split 0.5/0.5 over the loser's two lanes
  // when both of its bases fell in the same wave, zero otherwise.
  RewardVector reward{};
  bool operator==(const Outcome&) const = default;
};

const char* WinConditionName(WinCondition c);

AbstractState InitialState(const GameConfig& config);

bool IsTerminal(const AbstractState& s, const GameConfig& config);

// Outcome implied by a terminal state, nullopt otherwise.
std::optional<Outcome> TerminalOutcome(const AbstractState& s,
                                       const GameConfig& config);

int PurchaseCost(const PurchaseAction& a, const GameConfig& config);
bool IsLegal(const AbstractState& s, Player p, const PurchaseAction& a,
             const GameConfig& config);

// Every affordable purchase, cheapest first and lexicographic within a cost,
// capped at config.action_cap. Empty for terminal states.
std::vector<PurchaseAction> LegalActions(const AbstractState& s, Player p,
                                         const GameConfig& config);

struct WaveResult {
  AbstractState state;
  std::optional<Outcome> outcome;
};

// Plays one wave. `rng` is only consumed when jitter is active.
// Throws LegalityError naming the offending purchase.
WaveResult SimulateWave(const AbstractState& s, const PurchaseAction& friendly,
                        const PurchaseAction& enemy, const GameConfig& config,
                        std::mt19937_64& rng);

// Jitter-free simulation; identical to SimulateWave on config.Deterministic().
WaveResult SimulateWaveDeterministic(const AbstractState& s,
                                     const PurchaseAction& friendly,
                                     const PurchaseAction& enemy,
                                     const GameConfig& config);

// Total health of a player's two bases.
inline int TotalHealth(const AbstractState& s, Player p) {
  return s.Health(p, Lane::kTop) + s.Health(p, Lane::kBottom);
}

std::string DebugString(const AbstractState& s);

}  // namespace tugcheck

#endif  // TUGCHECK_GAME_H_
