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

// JSON forms of states and actions shared by datasets, episode files and
// the HTTP API.
//
//   state:  {"health": [[ft, fb], [et, eb]],
//            "buildings": [[[m, b, i], [m, b, i]], ...],
//            "units": [[[[g1..g4] x3] x2] x2],
//            "currency": [f, e], "wave": n}
//   action: {"lane": "top", "purchases": [m, b, i]}

#ifndef TUGCHECK_STATE_JSON_H_
#define TUGCHECK_STATE_JSON_H_

#include <array>

#include "json.hpp"
#include "tugcheck/game.h"

namespace tugcheck {

nlohmann::json ToJson(const AbstractState& s);
nlohmann::json ToJson(const PurchaseAction& a);
nlohmann::json ToJson(const std::array<double, 4>& v);

// Throw FormatError on malformed input.
AbstractState StateFromJson(const nlohmann::json& j);
PurchaseAction ActionFromJson(const nlohmann::json& j);
std::array<double, 4> Vector4FromJson(const nlohmann::json& j);

}  // namespace tugcheck

#endif  // TUGCHECK_STATE_JSON_H_
