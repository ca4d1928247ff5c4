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

// Game loop and match harness.

#ifndef TUGCHECK_MATCH_H_
#define TUGCHECK_MATCH_H_

#include <cstdint>
#include <vector>

#include "tugcheck/agents.h"
#include "tugcheck/game.h"

namespace tugcheck {

// One recorded wave. `seed` seeds the wave's combat jitter, so replaying
// SimulateWave with it reproduces s_next.
struct TransitionRecord {
  AbstractState s;
  PurchaseAction a_f;
  PurchaseAction a_e;
  AbstractState s_next;
  RewardVector reward{};
  std::uint64_t seed = 0;
  int episode = 0;

  bool operator==(const TransitionRecord&) const = default;
};

struct GameResult {
  Outcome outcome;
  int waves = 0;
  std::vector<TransitionRecord> transitions;

  bool FriendlyWon() const { return outcome.winner == Player::kFriendly; }
};

std::uint64_t WaveSeed(std::uint64_t game_seed, int wave);

// Plays one full game. Agents draw from an rng seeded by `seed`.
GameResult PlayGame(const GameConfig& config, Agent& friendly, Agent& enemy,
                    std::uint64_t seed, int episode = 0);

// Replays a record through the simulator with its stored seed.
bool ReplayMatches(const TransitionRecord& r, const GameConfig& config);

struct MatchStats {
  int games = 0;
  int friendly_wins = 0;
  double WinRate() const { return games == 0 ? 0.0 : static_cast<double>(friendly_wins) / games; }
};

// Game i uses seed MixBits(seed + i).
MatchStats PlayMatch(const GameConfig& config, Agent& friendly, Agent& enemy, int games,
                     std::uint64_t seed);

}  // namespace tugcheck

#endif  // TUGCHECK_MATCH_H_
