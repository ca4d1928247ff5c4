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

#include "tugcheck/symmetry.h"

#include <utility>

namespace tugcheck {

const char* TransformName(Transform t) {
  return t == Transform::kFlipLanes ? "flip" : "reverse";
}

AbstractState FlipLanes(const AbstractState& s) {
  AbstractState out = s;
  for (int p = 0; p < kNumPlayers; ++p) {
    std::swap(out.health[p][0], out.health[p][1]);
    std::swap(out.buildings[p][0], out.buildings[p][1]);
    std::swap(out.units[p][0], out.units[p][1]);
  }
  return out;
}

PurchaseAction FlipLanes(const PurchaseAction& a) {
  if (a.IsEmpty()) return a;
  PurchaseAction out = a;
  out.lane = OtherLane(a.lane);
  return out;
}

ActionPair FlipLanes(const ActionPair& a) {
  return {FlipLanes(a.friendly), FlipLanes(a.enemy)};
}

AbstractState ReversePlayers(const AbstractState& s) {
  AbstractState out = s;
  std::swap(out.health[0], out.health[1]);
  std::swap(out.buildings[0], out.buildings[1]);
  std::swap(out.currency[0], out.currency[1]);
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int l = 0; l < kNumLanes; ++l) {
      for (int u = 0; u < kNumUnitTypes; ++u) {
        for (int g = 0; g < kNumGrids; ++g) {
          out.units[p][l][u][g] = s.units[1 - p][l][u][kNumGrids - 1 - g];
        }
      }
    }
  }
  return out;
}

ActionPair ReversePlayers(const ActionPair& a) { return {a.enemy, a.friendly}; }

AbstractState Apply(Transform t, const AbstractState& s) {
  return t == Transform::kFlipLanes ? FlipLanes(s) : ReversePlayers(s);
}

ActionPair Apply(Transform t, const ActionPair& a) {
  return t == Transform::kFlipLanes ? FlipLanes(a) : ReversePlayers(a);
}

}  // namespace tugcheck
