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

#include "tugcheck/features.h"

#include <algorithm>
#include <cmath>

namespace tugcheck {

int FeatureScale(int index, const GameConfig& config) {
  if (index < kBuildingsOffset) return config.base_health;
  if (index < kUnitsOffset) return kBuildingScale;
  if (index < kCurrencyOffset) return kUnitScale;
  if (index < kWaveOffset) return kCurrencyScale;
  return config.max_waves;
}

void EncodeState(const AbstractState& s, const GameConfig& config,
                 std::span<float> out) {
  int i = 0;
  auto put = [&](int value) {
    out[i] = static_cast<float>(value) / static_cast<float>(FeatureScale(i, config));
    ++i;
  };
  for (const auto& per_lane : s.health) {
    for (int h : per_lane) put(h);
  }
  for (const auto& per_lane : s.buildings) {
    for (const auto& per_unit : per_lane) {
      for (int b : per_unit) put(b);
    }
  }
  for (const auto& per_lane : s.units) {
    for (const auto& per_unit : per_lane) {
      for (const auto& grids : per_unit) {
        for (int n : grids) put(n);
      }
    }
  }
  for (int c : s.currency) put(c);
  put(s.wave_index);
}

AbstractState DecodeState(std::span<const float> features, const GameConfig& config) {
  AbstractState s;
  int i = 0;
  auto get = [&]() {
    const int scale = FeatureScale(i, config);
    long v = std::lround(static_cast<double>(features[i]) * scale);
    ++i;
    return static_cast<int>(std::clamp<long>(v, 0, scale));
  };
  for (auto& per_lane : s.health) {
    for (int& h : per_lane) h = get();
  }
  for (auto& per_lane : s.buildings) {
    for (auto& per_unit : per_lane) {
      for (int& b : per_unit) b = get();
    }
  }
  for (auto& per_lane : s.units) {
    for (auto& per_unit : per_lane) {
      for (auto& grids : per_unit) {
        for (int& n : grids) n = get();
      }
    }
  }
  for (int& c : s.currency) c = get();
  s.wave_index = get();
  return s;
}

void EncodeAction(const PurchaseAction& a, std::span<float> out) {
  out[0] = !a.IsEmpty() && a.lane == Lane::kTop ? 1.0f : 0.0f;
  out[1] = !a.IsEmpty() && a.lane == Lane::kBottom ? 1.0f : 0.0f;
  for (int u = 0; u < kNumUnitTypes; ++u) {
    out[2 + u] = static_cast<float>(a.purchases[u]) / kPurchaseScale;
  }
}

}  // namespace tugcheck
