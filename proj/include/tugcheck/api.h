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


// HTTP API over an immutable tree-store snapshot.
//
// ApiService maps a request (method, path, query, body) to a JSON response
// and carries no transport code, so tests and the CLI can drive it
// directly. HttpServer mounts it on cpp-httplib under /api/v1.
//
// Endpoints:
//   GET  /api/v1/health
//   GET  /api/v1/catalog[?namespace=N&prefix=P]
//   GET  /api/v1/episodes
//   GET  /api/v1/episodes/{id}
//   GET  /api/v1/episodes/{id}/decisions
//   GET  /api/v1/episodes/{id}/decisions/{d}/tree
//   GET  /api/v1/episodes/{id}/decisions/{d}/slice?ruleId=R | class=C&text=T
//   GET  /api/v1/rules
//   GET  /api/v1/rules/{id}
//   POST /api/v1/rules            {name, class, text, severity?, description?}
//   POST /api/v1/rules/validate   {class, text}
//   POST /api/v1/evaluate         {ruleId | rule:{class,text}, episodeId?,
//                                  modelPredictedOnly?, page?, pageSize?}
//
// Every body carries "schemaVersion" and "snapshot". Errors are
// {"error": {"code", "message", "diagnostics"?}} with status 400 (bad
// request), 404 (unknown id), 405, 409 (counterfactuals not materialized)
// or 422 (rule diagnostics).

#ifndef TUGCHECK_API_H_
#define TUGCHECK_API_H_

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "tugcheck/query_engine.h"
#include "tugcheck/rule_dsl.h"
#include "tugcheck/tree_store.h"

namespace tugcheck {

inline constexpr int kApiSchemaVersion = 1;
inline constexpr const char* kApiPrefix = "/api/v1";

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class ApiService {
 public:
  ApiService(std::shared_ptr<const TreeStore> store, std::string snapshot_id);

  // Thread-safe. Never throws; failures become error responses.
  ApiResponse Handle(const ApiRequest& request);

  // Throws ConfigError on a duplicate name.
  void RegisterRule(QueryRule rule);
  std::vector<QueryRule> Rules() const;

  const TreeStore& store() const { return *store_; }
  const std::string& snapshot_id() const { return snapshot_id_; }

 private:
  ApiResponse Route(const ApiRequest& request);
  QueryRule RuleFromRequest(const nlohmann::json& body, bool named) const;
  QueryRule LookupRule(const std::string& id) const;

  std::shared_ptr<const TreeStore> store_;
  std::string snapshot_id_;
  mutable std::shared_mutex rules_mutex_;
  std::vector<QueryRule> rules_;
};

// Snapshot id of a store file: the hash of its bytes.
std::string SnapshotIdOfFile(const std::string& path);

class HttpServer {
 public:
  explicit HttpServer(ApiService& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the port or
  // throws Error.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); blocks.
  void Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Port from TUGCHECK_PORT, else `fallback`.
int PortFromEnvironment(int fallback = 8080);

}  // namespace tugcheck

#endif  // TUGCHECK_API_H_
