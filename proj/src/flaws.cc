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

#include "tugcheck/flaws.h"

#include <algorithm>
#include <sstream>

#include "tugcheck/common.h"

namespace tugcheck {

namespace {

std::uint64_t InputHash(std::uint64_t seed, const AbstractState& s, const ActionPair& a) {
  Fnv1a h;
  h.Update(seed);
  auto add = [&h](int v) { h.Update(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); };
  for (const auto& pl : s.health) for (int v : pl) add(v);
  for (const auto& pl : s.buildings) for (const auto& pu : pl) for (int v : pu) add(v);
  for (const auto& pl : s.units)
    for (const auto& pu : pl)
      for (const auto& g : pu)
        for (int v : g) add(v);
  for (int v : s.currency) add(v);
  add(s.wave_index);
  for (const PurchaseAction* p : {&a.friendly, &a.enemy}) {
    add(Idx(p->lane));
    for (int v : p->purchases) add(v);
  }
  return h.digest();
}

double UnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
}

std::string Require(const std::map<std::string, std::string>& params, const std::string& key,
                    const std::string& flaw) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError(flaw + ": missing parameter '" + key + "'");
  return it->second;
}

}  // namespace

FlawSpec FlawSpec::FromKeyValue(const KeyValueConfig& kv) {
  FlawSpec spec;
  spec.seed = static_cast<std::uint64_t>(kv.GetInt("seed", 0));
  if (auto v = kv.Get("healthInflation")) {
    auto p = ParseParamList(*v);
    HealthInflation f;
    f.lane = ParseLane(Require(p, "lane", "healthInflation"));
    f.player = ParsePlayer(Require(p, "player", "healthInflation"));
    f.amount = std::stoi(Require(p, "amount", "healthInflation"));
    f.probability = std::stod(Require(p, "probability", "healthInflation"));
    if (f.probability < 0 || f.probability > 1) {
      throw ConfigError("healthInflation: probability must be in [0, 1]");
    }
    spec.health_inflation = f;
  }
  if (auto v = kv.Get("phantomUnits")) {
    auto p = ParseParamList(*v);
    PhantomUnits f;
    f.unit = ParseUnitType(Require(p, "unit", "phantomUnits"));
    f.count = std::stoi(Require(p, "count", "phantomUnits"));
    if (p.count("lane")) f.lane = ParseLane(p["lane"]);
    if (p.count("player")) f.player = ParsePlayer(p["player"]);
    spec.phantom_units = f;
  }
  if (auto v = kv.Get("asymmetryNoise")) {
    auto p = ParseParamList(*v);
    AsymmetryNoise f;
    f.scale = std::stoi(Require(p, "scale", "asymmetryNoise"));
    if (f.scale < 0) throw ConfigError("asymmetryNoise: scale must be non-negative");
    spec.asymmetry_noise = f;
  }
  if (auto v = kv.Get("winProbLeak")) {
    auto p = ParseParamList(*v);
    WinProbLeak f;
    f.epsilon = std::stod(Require(p, "epsilon", "winProbLeak"));
    spec.win_prob_leak = f;
  }
  if (auto v = kv.Get("ranker")) {
    if (*v == "inverted") {
      spec.invert_ranker = true;
    } else if (*v != "normal") {
      throw ConfigError("ranker: expected 'normal' or 'inverted', got '" + *v + "'");
    }
  }
  return spec;
}

KeyValueConfig FlawSpec::ToKeyValue() const {
  KeyValueConfig kv;
  kv.Set("seed", std::to_string(seed));
  std::ostringstream s;
  if (health_inflation) {
    s.str("");
    s << "lane:" << LaneName(health_inflation->lane)
      << " player:" << PlayerName(health_inflation->player)
      << " amount:" << health_inflation->amount
      << " probability:" << health_inflation->probability;
    kv.Set("healthInflation", s.str());
  }
  if (phantom_units) {
    s.str("");
    s << "unit:" << UnitName(phantom_units->unit) << " count:" << phantom_units->count
      << " lane:" << LaneName(phantom_units->lane)
      << " player:" << PlayerName(phantom_units->player);
    kv.Set("phantomUnits", s.str());
  }
  if (asymmetry_noise) kv.Set("asymmetryNoise", "scale:" + std::to_string(asymmetry_noise->scale));
  if (win_prob_leak) {
    s.str("");
    s << "epsilon:" << win_prob_leak->epsilon;
    kv.Set("winProbLeak", s.str());
  }
  if (invert_ranker) kv.Set("ranker", "inverted");
  return kv;
}

std::string FlawSpec::Describe() const {
  std::string out;
  for (const auto& key : ToKeyValue().keys()) {
    if (key == "seed") continue;
    out += (out.empty() ? "" : ",") + key;
  }
  return out.empty() ? "none" : out;
}

void ApplyTransitionFlaws(const FlawSpec& spec, const AbstractState& input,
                          const ActionPair& actions, AbstractState* predicted) {
  if (!spec.AffectsTransitions()) return;
  const std::uint64_t key = InputHash(spec.seed, input, actions);
  if (spec.health_inflation) {
    const auto& f = *spec.health_inflation;
    if (UnitInterval(MixBits(key ^ 0x1)) < f.probability) {
      predicted->Health(f.player, f.lane) += f.amount;
    }
  }
  if (spec.phantom_units) {
    const auto& f = *spec.phantom_units;
    predicted->Units(f.player, f.lane, f.unit, 1) += f.count;
  }
  if (spec.asymmetry_noise && spec.asymmetry_noise->scale > 0) {
    const int scale = spec.asymmetry_noise->scale;
    std::uint64_t stream = key ^ 0x2;
    for (auto& per_lane : predicted->units) {
      for (auto& per_unit : per_lane) {
        for (auto& grids : per_unit) {
          for (int& n : grids) {
            stream = MixBits(stream);
            if (n == 0) continue;
            const int offset = static_cast<int>(stream % (2 * scale + 1)) - scale;
            n = std::max(0, n + offset);
          }
        }
      }
    }
  }
}

void ApplyValueFlaws(const FlawSpec& spec, QVector* value) {
  if (spec.win_prob_leak) {
    for (double& v : *value) v = std::min(1.0, v + spec.win_prob_leak->epsilon);
  }
}

}  // namespace tugcheck
