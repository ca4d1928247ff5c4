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

#include "tugcheck/state_json.h"

#include "tugcheck/common.h"

namespace tugcheck {

using nlohmann::json;

json ToJson(const AbstractState& s) {
  return json{{"health", s.health},
              {"buildings", s.buildings},
              {"units", s.units},
              {"currency", s.currency},
              {"wave", s.wave_index}};
}

json ToJson(const PurchaseAction& a) {
  return json{{"lane", LaneName(a.lane)}, {"purchases", a.purchases}};
}

json ToJson(const std::array<double, 4>& v) { return json(v); }

AbstractState StateFromJson(const json& j) {
  try {
    AbstractState s;
    j.at("health").get_to(s.health);
    j.at("buildings").get_to(s.buildings);
    j.at("units").get_to(s.units);
    j.at("currency").get_to(s.currency);
    j.at("wave").get_to(s.wave_index);
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed state: ") + e.what());
  }
}

PurchaseAction ActionFromJson(const json& j) {
  try {
    PurchaseAction a;
    a.lane = ParseLane(j.at("lane").get<std::string>());
    j.at("purchases").get_to(a.purchases);
    for (int n : a.purchases) {
      if (n < 0) throw FormatError("malformed action: negative purchase count");
    }
    if (a.IsEmpty()) a.lane = Lane::kTop;
    return a;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed action: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed action: ") + e.what());
  }
}

std::array<double, 4> Vector4FromJson(const json& j) {
  try {
    return j.get<std::array<double, 4>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed 4-vector: ") + e.what());
  }
}

}  // namespace tugcheck
