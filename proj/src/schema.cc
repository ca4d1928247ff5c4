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


#include "tugcheck/schema.h"

#include <algorithm>
#include <cctype>

namespace tugcheck {

namespace {

std::string Capitalized(std::string s) {
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::optional<int> Find(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<int>(it - names.begin());
}

std::vector<std::string> BuildStateNames() {
  std::vector<std::string> out;
  for (Player p : kPlayers) {
    for (Lane l : kLanes) {
      out.push_back(PlayerName(p) + std::string("Health") + Capitalized(LaneName(l)));
    }
  }
  for (Player p : kPlayers) {
    for (Lane l : kLanes) {
      for (UnitType u : kUnitTypes) {
        out.push_back(PlayerName(p) + Capitalized(UnitName(u)) + "Bldgs" +
                      Capitalized(LaneName(l)));
      }
    }
  }
  for (Player p : kPlayers) {
    for (Lane l : kLanes) {
      for (UnitType u : kUnitTypes) {
        for (int g = 1; g <= kNumGrids; ++g) {
          out.push_back(PlayerName(p) + Capitalized(UnitName(u)) + Capitalized(LaneName(l)) +
                        "Grid" + std::to_string(g));
        }
      }
    }
  }
  for (Player p : kPlayers) out.push_back(PlayerName(p) + std::string("Currency"));
  out.push_back("wave");
  return out;
}

std::vector<std::string> BuildActionNames() {
  std::vector<std::string> out;
  for (Player p : kPlayers) {
    for (UnitType u : kUnitTypes) {
      out.push_back("numOf" + Capitalized(UnitName(u)) + "BldgsPurchasedBy" +
                    Capitalized(PlayerName(p)));
    }
    out.push_back("laneOf" + Capitalized(PlayerName(p)));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& StateAttributeNames() {
  static const std::vector<std::string> names = BuildStateNames();
  return names;
}

std::optional<int> FindStateAttribute(std::string_view name) {
  return Find(StateAttributeNames(), name);
}

StateAttributes Flatten(const AbstractState& s) {
  StateAttributes out{};
  int i = 0;
  for (const auto& per_lane : s.health) {
    for (int h : per_lane) out[i++] = h;
  }
  for (const auto& per_lane : s.buildings) {
    for (const auto& per_unit : per_lane) {
      for (int b : per_unit) out[i++] = b;
    }
  }
  for (const auto& per_lane : s.units) {
    for (const auto& per_unit : per_lane) {
      for (const auto& grids : per_unit) {
        for (int n : grids) out[i++] = n;
      }
    }
  }
  for (int c : s.currency) out[i++] = c;
  out[i] = s.wave_index;
  return out;
}

AbstractState Unflatten(const StateAttributes& a) {
  AbstractState s;
  int i = 0;
  for (auto& per_lane : s.health) {
    for (int& h : per_lane) h = a[i++];
  }
  for (auto& per_lane : s.buildings) {
    for (auto& per_unit : per_lane) {
      for (int& b : per_unit) b = a[i++];
    }
  }
  for (auto& per_lane : s.units) {
    for (auto& per_unit : per_lane) {
      for (auto& grids : per_unit) {
        for (int& n : grids) n = a[i++];
      }
    }
  }
  for (int& c : s.currency) c = a[i++];
  s.wave_index = a[i];
  return s;
}

const std::vector<std::string>& WinProbAttributeNames() {
  static const std::vector<std::string> names = {
      "probabilityOfWinInTopLane", "probabilityOfWinInBottomLane",
      "probabilityOfEnemyWinInTopLane", "probabilityOfEnemyWinInBottomLane"};
  return names;
}

const std::vector<std::string>& WinProbAttributeAliases() {
  static const std::vector<std::string> names = {
      "probabilityOfDestroyingEnemyTopBase", "probabilityOfDestroyingEnemyBottomBase",
      "probabilityOfEnemyDestroyingFriendlyTopBase",
      "probabilityOfEnemyDestroyingFriendlyBottomBase"};
  return names;
}

std::optional<int> FindWinProbAttribute(std::string_view name) {
  if (auto i = Find(WinProbAttributeNames(), name)) return i;
  return Find(WinProbAttributeAliases(), name);
}

const std::vector<std::string>& ActionAttributeNames() {
  static const std::vector<std::string> names = BuildActionNames();
  return names;
}

std::optional<int> FindActionAttribute(std::string_view name) {
  return Find(ActionAttributeNames(), name);
}

std::array<int, kNumActionAttributes> FlattenAction(const ActionPair& a) {
  std::array<int, kNumActionAttributes> out{};
  int i = 0;
  for (const PurchaseAction* p : {&a.friendly, &a.enemy}) {
    for (int n : p->purchases) out[i++] = n;
    out[i++] = Idx(p->lane);
  }
  return out;
}

ActionPair UnflattenAction(const std::array<int, kNumActionAttributes>& a) {
  ActionPair out;
  int i = 0;
  for (PurchaseAction* p : {&out.friendly, &out.enemy}) {
    for (int& n : p->purchases) n = a[i++];
    p->lane = a[i++] == 0 ? Lane::kTop : Lane::kBottom;
  }
  return out;
}

}  // namespace tugcheck
