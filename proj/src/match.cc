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

#include "tugcheck/match.h"

#include "tugcheck/common.h"

namespace tugcheck {

std::uint64_t WaveSeed(std::uint64_t game_seed, int wave) {
  return MixBits(game_seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(wave + 1)));
}

GameResult PlayGame(const GameConfig& config, Agent& friendly, Agent& enemy,
                    std::uint64_t seed, int episode) {
  std::mt19937_64 agent_rng(seed);
  GameResult result;
  AbstractState s = InitialState(config);
  while (true) {
    TransitionRecord r;
    r.s = s;
    r.episode = episode;
    r.a_f = friendly.Act(s, Player::kFriendly, agent_rng);
    r.a_e = enemy.Act(s, Player::kEnemy, agent_rng);
    r.seed = WaveSeed(seed, s.wave_index);
    std::mt19937_64 wave_rng(r.seed);
    WaveResult w = SimulateWave(s, r.a_f, r.a_e, config, wave_rng);
    r.s_next = w.state;
    if (w.outcome) r.reward = w.outcome->reward;
    result.transitions.push_back(r);
    s = w.state;
    if (w.outcome) {
      result.outcome = *w.outcome;
      break;
    }
  }
  result.waves = static_cast<int>(result.transitions.size());
  return result;
}

bool ReplayMatches(const TransitionRecord& r, const GameConfig& config) {
  std::mt19937_64 rng(r.seed);
  WaveResult w = SimulateWave(r.s, r.a_f, r.a_e, config, rng);
  RewardVector reward{};
  if (w.outcome) reward = w.outcome->reward;
  return w.state == r.s_next && reward == r.reward;
}

MatchStats PlayMatch(const GameConfig& config, Agent& friendly, Agent& enemy, int games,
                     std::uint64_t seed) {
  MatchStats stats;
  for (int i = 0; i < games; ++i) {
    GameResult g = PlayGame(config, friendly, enemy, MixBits(seed + i), i);
    ++stats.games;
    stats.friendly_wins += g.FriendlyWon();
  }
  return stats;
}

}  // namespace tugcheck
