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

#ifndef TUGCHECK_SYMMETRY_H_
#define TUGCHECK_SYMMETRY_H_

#include <array>

#include "tugcheck/game.h"

namespace tugcheck {

enum class Transform : std::uint8_t { kFlipLanes = 0, kReversePlayers = 1 };

const char* TransformName(Transform t);  // "flip" / "reverse"

// Swaps top and bottom everywhere; player and grid index unchanged.
AbstractState FlipLanes(const AbstractState& s);
// Toggles the lane. The empty purchase is lane-less and maps to itself.
PurchaseAction FlipLanes(const PurchaseAction& a);
ActionPair FlipLanes(const ActionPair& a);

// Swaps friendly and enemy and mirrors grid g -> 5 - g. Lanes unchanged.
AbstractState ReversePlayers(const AbstractState& s);
// (a_f, a_e) -> (a_e, a_f); a purchase carries no grid so needs no mirror.
ActionPair ReversePlayers(const ActionPair& a);

AbstractState Apply(Transform t, const AbstractState& s);
ActionPair Apply(Transform t, const ActionPair& a);

// Component permutation of a 4-vector ordered as
// (friendly-top, friendly-bottom, enemy-top, enemy-bottom).
template <typename T>
std::array<T, 4> FlipComponents(const std::array<T, 4>& v) {
  return {v[1], v[0], v[3], v[2]};
}
template <typename T>
std::array<T, 4> ReverseComponents(const std::array<T, 4>& v) {
  return {v[2], v[3], v[0], v[1]};
}
template <typename T>
std::array<T, 4> Apply(Transform t, const std::array<T, 4>& v) {
  return t == Transform::kFlipLanes ? FlipComponents(v) : ReverseComponents(v);
}

}  // namespace tugcheck

#endif  // TUGCHECK_SYMMETRY_H_
