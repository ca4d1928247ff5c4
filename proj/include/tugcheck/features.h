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

#ifndef TUGCHECK_FEATURES_H_
#define TUGCHECK_FEATURES_H_

#include <span>

#include "tugcheck/game.h"

namespace tugcheck {

// Feature layout, in order: base health [player][lane] (4), buildings
// [player][lane][unit] (12), units [player][lane][unit][grid] (48),
// currency [player] (2), wave index (1).
inline constexpr int kHealthOffset = 0;
inline constexpr int kBuildingsOffset = kHealthOffset + kNumPlayers * kNumLanes;
inline constexpr int kUnitsOffset = kBuildingsOffset + kNumPlayers * kNumLanes * kNumUnitTypes;
inline constexpr int kCurrencyOffset =
    kUnitsOffset + kNumPlayers * kNumLanes * kNumUnitTypes * kNumGrids;
inline constexpr int kWaveOffset = kCurrencyOffset + kNumPlayers;
inline constexpr int kStateFeatureSize = kWaveOffset + 1;
static_assert(kStateFeatureSize == 67);
// Lane one-hot (zero for the empty purchase) plus three scaled counts.
inline constexpr int kActionFeatureSize = 5;

// Documented scaling maxima. Health and wave scale by the config's own
// base health and wave limit.
inline constexpr int kBuildingScale = 40;
inline constexpr int kUnitScale = 100;
inline constexpr int kCurrencyScale = 5000;
inline constexpr int kPurchaseScale = 20;

// Writes kStateFeatureSize values in [0, 1] (for states inside the scale).
void EncodeState(const AbstractState& s, const GameConfig& config,
                 std::span<float> out);
// Rounds every value to the nearest integer and clamps it into range.
AbstractState DecodeState(std::span<const float> features, const GameConfig& config);
void EncodeAction(const PurchaseAction& a, std::span<float> out);

// Per-feature maximum used for scaling.
int FeatureScale(int index, const GameConfig& config);

}  // namespace tugcheck

#endif  // TUGCHECK_FEATURES_H_
