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

#ifndef TUGCHECK_KV_CONFIG_H_
#define TUGCHECK_KV_CONFIG_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tugcheck {

// Plain-text `key = value` configuration. Lines starting with '#' are
// comments; keys are unique (a repeated key is an error). Order of first
// appearance is kept for round-tripping.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::string_view text);
  static KeyValueConfig Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  void Set(const std::string& key, const std::string& value);

  std::string GetString(const std::string& key, const std::string& fallback) const;
  long GetInt(const std::string& key, long fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

  const std::vector<std::string>& keys() const { return order_; }
  std::string Serialize() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

// Splits "k1:v1 k2:v2" style parameter lists used inside config values.
std::map<std::string, std::string> ParseParamList(std::string_view text);

std::string Trim(std::string_view s);

}  // namespace tugcheck

#endif  // TUGCHECK_KV_CONFIG_H_
