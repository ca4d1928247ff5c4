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

#include "tugcheck/game.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "tugcheck/common.h"

namespace tugcheck {

const char* PlayerName(Player p) {
  return p == Player::kFriendly ? "friendly" : "enemy";
}
const char* LaneName(Lane l) { return l == Lane::kTop ? "top" : "bottom"; }
const char* UnitName(UnitType u) {
  switch (u) {
    case UnitType::kMarine:
      return "marine";
    case UnitType::kBaneling:
      return "baneling";
    case UnitType::kImmortal:
      return "immortal";
  }
  return "?";
}

Lane ParseLane(const std::string& s) {
  if (s == "top") return Lane::kTop;
  if (s == "bottom") return Lane::kBottom;
  throw ConfigError("unknown lane '" + s + "'");
}

Player ParsePlayer(const std::string& s) {
  if (s == "friendly") return Player::kFriendly;
  if (s == "enemy") return Player::kEnemy;
  throw ConfigError("unknown player '" + s + "'");
}

UnitType ParseUnitType(const std::string& s) {
  for (UnitType u : kUnitTypes) {
    if (s == UnitName(u)) return u;
  }
  throw ConfigError("unknown unit type '" + s + "'");
}

const char* WinConditionName(WinCondition c) {
  switch (c) {
    case WinCondition::kFriendlyDestroysEnemyTop:
      return "friendlyDestroysEnemyTop";
    case WinCondition::kFriendlyDestroysEnemyBottom:
      return "friendlyDestroysEnemyBottom";
    case WinCondition::kEnemyDestroysFriendlyTop:
      return "enemyDestroysFriendlyTop";
    case WinCondition::kEnemyDestroysFriendlyBottom:
      return "enemyDestroysFriendlyBottom";
    case WinCondition::kTimeoutLowestHealth:
      return "timeoutLowestHealth";
    case WinCondition::kMutualDestruction:
      return "mutualDestruction";
  }
  return "?";
}

PurchaseAction EmptyAction() { return PurchaseAction{}; }

std::string ToString(const PurchaseAction& a) {
  if (a.IsEmpty()) return "nothing";
  std::ostringstream out;
  out << LaneName(a.lane) << ":";
  bool first = true;
  for (UnitType u : kUnitTypes) {
    int n = a.purchases[Idx(u)];
    if (n == 0) continue;
    out << (first ? "" : "+") << n << "x" << UnitName(u);
    first = false;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// GameConfig

void GameConfig::Validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("invalid game config: " + m); };
  for (int u = 0; u < kNumUnitTypes; ++u) {
    if (unit_cost[u] <= 0) fail("unit costs must be positive");
    if (unit_hp[u] <= 0) fail("unit HP must be positive");
    if (base_damage[u] <= 0) fail("base damage must be positive");
    if (ticks_per_cell[u] <= 0) fail("ticks per cell must be positive");
    for (int v = 0; v < kNumUnitTypes; ++v) {
      if (damage[u][v] <= 0) fail("damage entries must be positive");
    }
  }
  if (income_per_wave <= 0) fail("income per wave must be positive");
  if (starting_currency < 0) fail("starting currency must be non-negative");
  if (ticks_per_wave <= 0) fail("ticks per wave must be positive");
  if (base_health <= 0 || base_health > kMaxBaseHealth) fail("base health must be in (0, 2000]");
  if (max_waves <= 0 || max_waves > kMaxWaves) fail("max waves must be in (0, 40]");
  if (action_cap < 1) fail("action cap must be at least 1");
  if (!(damage_jitter_fraction >= 0.0 && damage_jitter_fraction < 1.0)) {
    fail("damage jitter fraction must be in [0, 1)");
  }
}

GameConfig GameConfig::Shrunken() {
  GameConfig c;
  c.base_health = 200;
  c.max_waves = 10;
  return c;
}

GameConfig GameConfig::Deterministic() const {
  GameConfig c = *this;
  c.deterministic_mode = true;
  return c;
}

namespace {

const char* kUnitKeys[] = {"marine", "baneling", "immortal"};

}  // namespace

GameConfig GameConfig::FromKeyValue(const KeyValueConfig& kv) {
  GameConfig c;
  if (kv.GetString("preset", "default") == "shrunken") c = Shrunken();
  for (int u = 0; u < kNumUnitTypes; ++u) {
    std::string n = kUnitKeys[u];
    c.unit_cost[u] = kv.GetInt("cost." + n, c.unit_cost[u]);
    c.unit_hp[u] = kv.GetInt("hp." + n, c.unit_hp[u]);
    c.base_damage[u] = kv.GetInt("base_damage." + n, c.base_damage[u]);
    c.ticks_per_cell[u] = kv.GetInt("ticks_per_cell." + n, c.ticks_per_cell[u]);
    for (int v = 0; v < kNumUnitTypes; ++v) {
      c.damage[u][v] = kv.GetInt("damage." + n + "." + kUnitKeys[v], c.damage[u][v]);
    }
  }
  c.income_per_wave = kv.GetInt("income_per_wave", c.income_per_wave);
  c.starting_currency = kv.GetInt("starting_currency", c.starting_currency);
  c.ticks_per_wave = kv.GetInt("ticks_per_wave", c.ticks_per_wave);
  c.base_health = kv.GetInt("base_health", c.base_health);
  c.max_waves = kv.GetInt("max_waves", c.max_waves);
  c.action_cap = kv.GetInt("action_cap", c.action_cap);
  c.damage_jitter_fraction = kv.GetDouble("damage_jitter_fraction", c.damage_jitter_fraction);
  c.rng_seed = static_cast<std::uint64_t>(kv.GetInt("rng_seed", static_cast<long>(c.rng_seed)));
  c.deterministic_mode = kv.GetBool("deterministic_mode", c.deterministic_mode);
  c.Validate();
  return c;
}

GameConfig GameConfig::Load(const std::string& path) {
  return FromKeyValue(KeyValueConfig::Load(path));
}

KeyValueConfig GameConfig::ToKeyValue() const {
  KeyValueConfig kv;
  for (int u = 0; u < kNumUnitTypes; ++u) {
    std::string n = kUnitKeys[u];
    kv.Set("cost." + n, std::to_string(unit_cost[u]));
    kv.Set("hp." + n, std::to_string(unit_hp[u]));
    kv.Set("base_damage." + n, std::to_string(base_damage[u]));
    kv.Set("ticks_per_cell." + n, std::to_string(ticks_per_cell[u]));
    for (int v = 0; v < kNumUnitTypes; ++v) {
      kv.Set("damage." + n + "." + kUnitKeys[v], std::to_string(damage[u][v]));
    }
  }
  kv.Set("income_per_wave", std::to_string(income_per_wave));
  kv.Set("starting_currency", std::to_string(starting_currency));
  kv.Set("ticks_per_wave", std::to_string(ticks_per_wave));
  kv.Set("base_health", std::to_string(base_health));
  kv.Set("max_waves", std::to_string(max_waves));
  kv.Set("action_cap", std::to_string(action_cap));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", damage_jitter_fraction);
  kv.Set("damage_jitter_fraction", buf);
  kv.Set("rng_seed", std::to_string(rng_seed));
  kv.Set("deterministic_mode", deterministic_mode ? "true" : "false");
  return kv;
}

std::uint64_t GameConfig::Hash() const {
  return HashBytes(ToKeyValue().Serialize());
}

// ---------------------------------------------------------------------------
// States and actions

AbstractState InitialState(const GameConfig& config) {
  AbstractState s;
  for (auto& per_lane : s.health) per_lane.fill(config.base_health);
  s.currency.fill(config.starting_currency);
  s.wave_index = 0;
  return s;
}

bool IsTerminal(const AbstractState& s, const GameConfig& config) {
  for (const auto& per_lane : s.health) {
    for (int h : per_lane) {
      if (h <= 0) return true;
    }
  }
  return s.wave_index >= config.max_waves;
}

namespace {

bool HasDestroyedBase(const AbstractState& s, Player p) {
  return s.Health(p, Lane::kTop) <= 0 || s.Health(p, Lane::kBottom) <= 0;
}

// Loser is the owner of the single lowest-health base; ties fall back to
// lower total health; a complete tie goes to the enemy.
Player LowestHealthLoser(const AbstractState& s) {
  int f_min = std::min(s.Health(Player::kFriendly, Lane::kTop),
                       s.Health(Player::kFriendly, Lane::kBottom));
  int e_min = std::min(s.Health(Player::kEnemy, Lane::kTop),
                       s.Health(Player::kEnemy, Lane::kBottom));
  if (f_min != e_min) return f_min < e_min ? Player::kFriendly : Player::kEnemy;
  int f_tot = TotalHealth(s, Player::kFriendly);
  int e_tot = TotalHealth(s, Player::kEnemy);
  if (f_tot != e_tot) return f_tot < e_tot ? Player::kFriendly : Player::kEnemy;
  return Player::kFriendly;
}

// Both of the loser's bases falling in one wave splits the reward evenly
// between the two lanes so the vector stays equivariant under a lane flip.
void SetDestroyReward(const AbstractState& s, Player loser, WinCondition top,
                      Outcome& out) {
  const int t = static_cast<int>(top);
  const bool top_down = s.Health(loser, Lane::kTop) <= 0;
  const bool bottom_down = s.Health(loser, Lane::kBottom) <= 0;
  if (top_down && bottom_down) {
    out.reward[t] = 0.5;
    out.reward[t + 1] = 0.5;
  } else {
    out.reward[top_down ? t : t + 1] = 1.0;
  }
}

}  // namespace

std::optional<Outcome> TerminalOutcome(const AbstractState& s,
                                       const GameConfig& config) {
  bool f_lost = HasDestroyedBase(s, Player::kFriendly);
  bool e_lost = HasDestroyedBase(s, Player::kEnemy);
  Outcome out;
  if (e_lost && !f_lost) {
    out.winner = Player::kFriendly;
    out.condition = s.Health(Player::kEnemy, Lane::kTop) <= 0
                        ? WinCondition::kFriendlyDestroysEnemyTop
                        : WinCondition::kFriendlyDestroysEnemyBottom;
    SetDestroyReward(s, Player::kEnemy, WinCondition::kFriendlyDestroysEnemyTop, out);
    return out;
  }
  if (f_lost && !e_lost) {
    out.winner = Player::kEnemy;
    out.condition = s.Health(Player::kFriendly, Lane::kTop) <= 0
                        ? WinCondition::kEnemyDestroysFriendlyTop
                        : WinCondition::kEnemyDestroysFriendlyBottom;
    SetDestroyReward(s, Player::kFriendly, WinCondition::kEnemyDestroysFriendlyTop, out);
    return out;
  }
  if (f_lost && e_lost) {
    out.condition = WinCondition::kMutualDestruction;
    out.winner = Opponent(LowestHealthLoser(s));
    return out;
  }
  if (s.wave_index >= config.max_waves) {
    out.condition = WinCondition::kTimeoutLowestHealth;
    out.winner = Opponent(LowestHealthLoser(s));
    return out;
  }
  return std::nullopt;
}

int PurchaseCost(const PurchaseAction& a, const GameConfig& config) {
  int cost = 0;
  for (int u = 0; u < kNumUnitTypes; ++u) cost += a.purchases[u] * config.unit_cost[u];
  return cost;
}

bool IsLegal(const AbstractState& s, Player p, const PurchaseAction& a,
             const GameConfig& config) {
  for (int n : a.purchases) {
    if (n < 0) return false;
  }
  return PurchaseCost(a, config) <= s.Currency(p);
}

std::vector<PurchaseAction> LegalActions(const AbstractState& s, Player p,
                                         const GameConfig& config) {
  std::vector<PurchaseAction> out;
  if (IsTerminal(s, config)) return out;
  const int budget = s.Currency(p);
  struct Combo {
    int cost;
    PerUnit<int> counts;
  };
  std::vector<Combo> combos;
  const auto& c = config.unit_cost;
  for (int i = 0; i * c[2] <= budget; ++i) {
    for (int b = 0; i * c[2] + b * c[1] <= budget; ++b) {
      for (int m = 0; i * c[2] + b * c[1] + m * c[0] <= budget; ++m) {
        if (m == 0 && b == 0 && i == 0) continue;
        combos.push_back({m * c[0] + b * c[1] + i * c[2], {m, b, i}});
      }
    }
  }
  std::sort(combos.begin(), combos.end(), [](const Combo& x, const Combo& y) {
    return std::tie(x.cost, x.counts) < std::tie(y.cost, y.counts);
  });
  const size_t cap = static_cast<size_t>(config.action_cap);
  out.reserve(std::min(cap, 1 + 2 * combos.size()));
  out.push_back(EmptyAction());
  for (const Combo& combo : combos) {
    for (Lane lane : kLanes) {
      if (out.size() >= cap) return out;
      out.push_back(PurchaseAction{lane, combo.counts});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wave simulation

namespace {

constexpr int kAttackBase = -2;
constexpr int kNoTarget = -1;

// Friendly units walk toward higher grid indices, enemy units toward lower.
constexpr int Direction(int p) { return p == 0 ? 1 : -1; }
constexpr int HomeCell(int p) { return p == 0 ? 0 : kNumGrids - 1; }
constexpr int FrontCell(int p) { return p == 0 ? kNumGrids - 1 : 0; }

struct LaneCombat {
  // [player][unit][cell]
  int count[kNumPlayers][kNumUnitTypes][kNumGrids];
  long pool[kNumPlayers][kNumUnitTypes][kNumGrids];

  bool Occupied(int p, int cell) const {
    return count[p][0][cell] + count[p][1][cell] + count[p][2][cell] > 0;
  }
  bool Empty() const {
    for (int p = 0; p < kNumPlayers; ++p) {
      for (int c = 0; c < kNumGrids; ++c) {
        if (Occupied(p, c)) return false;
      }
    }
    return true;
  }
  int TargetOf(int p, int cell) const {
    const int opp = 1 - p;
    if (Occupied(opp, cell)) return cell;
    const int ahead = cell + Direction(p);
    if (ahead >= 0 && ahead < kNumGrids && Occupied(opp, ahead)) return ahead;
    if (cell == FrontCell(p)) return kAttackBase;
    return kNoTarget;
  }
};

class Jitter {
 public:
  Jitter(double fraction, std::mt19937_64* rng)
      : fraction_(fraction), rng_(rng), dist_(1.0 - fraction, 1.0 + fraction) {}
  long Apply(double amount) {
    if (fraction_ > 0.0) amount *= dist_(*rng_);
    return std::lround(amount);
  }

 private:
  double fraction_;
  std::mt19937_64* rng_;
  std::uniform_real_distribution<double> dist_;
};

// One combat tick in one lane: simultaneous damage, then kills, then
// movement for unit types whose step falls on this tick.
void CombatTick(LaneCombat& lane, int tick, int base_health[kNumPlayers],
                const GameConfig& config, Jitter& jitter) {
  if (lane.Empty()) return;
  int target[kNumPlayers][kNumGrids];
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int c = 0; c < kNumGrids; ++c) {
      target[p][c] = lane.Occupied(p, c) ? lane.TargetOf(p, c) : kNoTarget;
    }
  }
  long incoming[kNumPlayers][kNumUnitTypes][kNumGrids] = {};
  long base_hit[kNumPlayers] = {0, 0};
  for (int p = 0; p < kNumPlayers; ++p) {
    const int opp = 1 - p;
    for (int c = 0; c < kNumGrids; ++c) {
      const int t = target[p][c];
      if (t == kNoTarget) continue;
      for (int u = 0; u < kNumUnitTypes; ++u) {
        const int n = lane.count[p][u][c];
        if (n == 0) continue;
        if (t == kAttackBase) {
          base_hit[opp] += jitter.Apply(static_cast<double>(n) * config.base_damage[u]);
          continue;
        }
        const int defenders = lane.count[opp][0][t] + lane.count[opp][1][t] +
                              lane.count[opp][2][t];
        for (int v = 0; v < kNumUnitTypes; ++v) {
          const int dv = lane.count[opp][v][t];
          if (dv == 0) continue;
          // Damage is spread across defender types in proportion to count.
          const double amount =
              static_cast<double>(n) * config.damage[u][v] * dv / defenders;
          incoming[opp][v][t] += jitter.Apply(amount);
        }
      }
    }
  }
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int u = 0; u < kNumUnitTypes; ++u) {
      const long hp = config.unit_hp[u];
      for (int c = 0; c < kNumGrids; ++c) {
        int& n = lane.count[p][u][c];
        long& pool = lane.pool[p][u][c];
        pool += incoming[p][u][c];
        if (n == 0) {
          pool = 0;
          continue;
        }
        const long kills = std::min<long>(n, pool / hp);
        n -= static_cast<int>(kills);
        pool = n == 0 ? 0 : pool - kills * hp;
      }
    }
    base_health[p] = static_cast<int>(std::max<long>(0, base_health[p] - base_hit[p]));
  }

  bool engaged[kNumPlayers][kNumGrids];
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int c = 0; c < kNumGrids; ++c) {
      const int t = lane.Occupied(p, c) ? lane.TargetOf(p, c) : kNoTarget;
      engaged[p][c] = t != kNoTarget;
    }
  }
  for (int u = 0; u < kNumUnitTypes; ++u) {
    if ((tick + 1) % config.ticks_per_cell[u] != 0) continue;
    for (int p = 0; p < kNumPlayers; ++p) {
      int moved[kNumGrids] = {};
      long moved_pool[kNumGrids] = {};
      for (int c = 0; c < kNumGrids; ++c) {
        int n = lane.count[p][u][c];
        if (n == 0) continue;
        if (engaged[p][c] || c == FrontCell(p)) {
          moved[c] += n;
          moved_pool[c] += lane.pool[p][u][c];
        } else {
          moved[c + Direction(p)] += n;
          moved_pool[c + Direction(p)] += lane.pool[p][u][c];
        }
      }
      for (int c = 0; c < kNumGrids; ++c) {
        lane.count[p][u][c] = moved[c];
        lane.pool[p][u][c] = moved_pool[c];
      }
    }
  }
}

WaveResult Simulate(const AbstractState& s, const PurchaseAction& friendly,
                    const PurchaseAction& enemy, const GameConfig& config,
                    double jitter_fraction, std::mt19937_64* rng) {
  const PurchaseAction* actions[kNumPlayers] = {&friendly, &enemy};
  for (int p = 0; p < kNumPlayers; ++p) {
    const Player player = static_cast<Player>(p);
    if (!IsLegal(s, player, *actions[p], config)) {
      throw LegalityError(std::string("illegal purchase for ") + PlayerName(player) +
                          ": " + ToString(*actions[p]) + " costs " +
                          std::to_string(PurchaseCost(*actions[p], config)) +
                          " with currency " + std::to_string(s.Currency(player)));
    }
  }
  WaveResult result{s, std::nullopt};
  AbstractState& next = result.state;
  for (int p = 0; p < kNumPlayers; ++p) {
    const PurchaseAction& a = *actions[p];
    next.currency[p] -= PurchaseCost(a, config);
    for (int u = 0; u < kNumUnitTypes; ++u) {
      next.buildings[p][Idx(a.lane)][u] += a.purchases[u];
    }
  }

  LaneCombat lanes[kNumLanes];
  int health[kNumLanes][kNumPlayers];
  for (int l = 0; l < kNumLanes; ++l) {
    for (int p = 0; p < kNumPlayers; ++p) {
      health[l][p] = next.health[p][l];
      for (int u = 0; u < kNumUnitTypes; ++u) {
        for (int c = 0; c < kNumGrids; ++c) {
          lanes[l].count[p][u][c] = next.units[p][l][u][c];
          lanes[l].pool[p][u][c] = 0;
        }
        // Each building produces one unit at the owner's end of the lane.
        lanes[l].count[p][u][HomeCell(p)] += next.buildings[p][l][u];
      }
    }
  }

  Jitter jitter(jitter_fraction, rng);
  for (int tick = 0; tick < config.ticks_per_wave; ++tick) {
    bool destroyed = false;
    for (int l = 0; l < kNumLanes; ++l) {
      CombatTick(lanes[l], tick, health[l], config, jitter);
      destroyed = destroyed || health[l][0] == 0 || health[l][1] == 0;
    }
    if (destroyed) break;
  }

  for (int l = 0; l < kNumLanes; ++l) {
    for (int p = 0; p < kNumPlayers; ++p) {
      next.health[p][l] = health[l][p];
      for (int u = 0; u < kNumUnitTypes; ++u) {
        for (int c = 0; c < kNumGrids; ++c) {
          next.units[p][l][u][c] = lanes[l].count[p][u][c];
        }
      }
    }
  }
  for (int p = 0; p < kNumPlayers; ++p) next.currency[p] += config.income_per_wave;
  next.wave_index += 1;
  result.outcome = TerminalOutcome(next, config);
  return result;
}

}  // namespace

WaveResult SimulateWave(const AbstractState& s, const PurchaseAction& friendly,
                        const PurchaseAction& enemy, const GameConfig& config,
                        std::mt19937_64& rng) {
  const double j = config.deterministic_mode ? 0.0 : config.damage_jitter_fraction;
  return Simulate(s, friendly, enemy, config, j, &rng);
}

WaveResult SimulateWaveDeterministic(const AbstractState& s,
                                     const PurchaseAction& friendly,
                                     const PurchaseAction& enemy,
                                     const GameConfig& config) {
  return Simulate(s, friendly, enemy, config, 0.0, nullptr);
}

std::string DebugString(const AbstractState& s) {
  std::ostringstream out;
  out << "wave " << s.wave_index;
  for (Player p : kPlayers) {
    out << "\n" << PlayerName(p) << ": currency " << s.Currency(p);
    for (Lane l : kLanes) {
      out << "\n  " << LaneName(l) << " hp " << s.Health(p, l) << " bldgs";
      for (UnitType u : kUnitTypes) out << " " << s.Buildings(p, l, u);
      out << " units";
      for (UnitType u : kUnitTypes) {
        out << " [";
        for (int g = 1; g <= kNumGrids; ++g) out << (g > 1 ? " " : "") << s.Units(p, l, u, g);
        out << "]";
      }
    }
  }
  return out.str();
}

}  // namespace tugcheck
