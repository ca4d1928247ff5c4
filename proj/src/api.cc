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


#include "tugcheck/api.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "tugcheck/state_json.h"

namespace tugcheck {

using nlohmann::json;

namespace {

constexpr long kDefaultPageSize = 100;
constexpr long kMaxPageSize = 1000;

struct ApiError {
  int status;
  std::string code;
  std::string message;
  json diagnostics = nullptr;
};

[[noreturn]] void Throw(int status, const std::string& code, const std::string& message) {
  throw ApiError{status, code, message};
}

json DiagnosticJson(const Diagnostic& d) {
  return {{"code", d.code},
          {"message", d.message},
          {"line", d.line},
          {"column", d.column},
          {"suggestions", d.suggestions}};
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(path);
  while (std::getline(in, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

long ParseLong(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  Throw(400, "bad-request", what + " must be an integer, got '" + text + "'");
}

json ParseBody(const std::string& body) {
  json j = json::parse(body.empty() ? "{}" : body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) Throw(400, "bad-request", "body must be a JSON object");
  return j;
}

std::string StringField(const json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) Throw(400, "bad-request", std::string("missing field '") + key + "'");
    return "";
  }
  if (!j[key].is_string()) Throw(400, "bad-request", std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

json RuleJson(const QueryRule& r) {
  return {{"name", r.name},
          {"class", RuleClassName(r.rule_class)},
          {"severity", SeverityName(r.severity)},
          {"description", r.description},
          {"text", r.source},
          {"canonical", PrettyPrint(r)}};
}

json ActionPairJson(const ActionPair& a) {
  return {{"friendly", ToJson(a.friendly)}, {"enemy", ToJson(a.enemy)}};
}

json NodeDetails(const TreeStore& store, RowId row) {
  json j{{"state", ToJson(store.StateAt(row))}, {"winProb", ToJson(store.WinProbAt(row))}};
  const RowId action = store.states().parent_action[row];
  j["action"] = action == kNoRow ? json(nullptr) : ActionPairJson(store.ActionAt(action));
  j["terminal"] = store.states().terminal[row] != 0;
  j["backedUpValue"] = store.states().backed_up_value[row];
  return j;
}

json EpisodeJson(const TreeStore& store, const EpisodeRow& e) {
  const EpisodeSummary s = store.Summary(e.id);
  const int index = store.EpisodeIndex(e.id);
  return {{"id", e.id},
          {"isWin", e.is_win},
          {"waveCount", e.wave_count},
          {"decisions", s.decisions},
          {"states", s.states},
          {"transitions", s.transitions},
          {"bundle", e.bundle},
          {"seed", e.seed},
          {"plannerSide", PlayerName(e.planner_side)},
          {"configHash", HexDigest(e.config_hash)},
          {"counterfactuals",
           {{"flip", store.HasCounterfactuals(index, Transform::kFlipLanes)},
            {"reverse", store.HasCounterfactuals(index, Transform::kReversePlayers)}}}};
}

json CatalogJson(const SchemaCatalog& catalog) {
  static const char* kKinds[] = {"state", "winProb", "action"};
  json namespaces = json::array();
  for (int n = 0; n < kNumNamespaces; ++n) {
    const Namespace ns = static_cast<Namespace>(n);
    json attrs = json::array();
    for (const auto& e : catalog.Attributes(ns)) {
      attrs.push_back({{"name", e.name}, {"kind", kKinds[static_cast<int>(e.kind)]}});
    }
    namespaces.push_back({{"name", NamespaceName(ns)}, {"attributes", attrs}});
  }
  json classes = json::array();
  for (RuleClass c : {RuleClass::kStaticState, RuleClass::kTransition, RuleClass::kSymmetryFlip,
                      RuleClass::kSymmetryReverse}) {
    json allowed = json::array();
    for (int n = 0; n < kNumNamespaces; ++n) {
      if (NamespaceAllowed(c, static_cast<Namespace>(n))) {
        allowed.push_back(NamespaceName(static_cast<Namespace>(n)));
      }
    }
    classes.push_back({{"name", RuleClassName(c)}, {"namespaces", allowed}});
  }
  return {{"namespaces", namespaces}, {"aliases", catalog.aliases()}, {"ruleClasses", classes}};
}

}  // namespace

ApiService::ApiService(std::shared_ptr<const TreeStore> store, std::string snapshot_id)
    : store_(std::move(store)), snapshot_id_(std::move(snapshot_id)) {
  if (!store_) throw ConfigError("the API needs a store");
}

void ApiService::RegisterRule(QueryRule rule) {
  if (rule.name.empty()) throw ConfigError("rules need a name");
  std::unique_lock lock(rules_mutex_);
  for (const QueryRule& r : rules_) {
    if (r.name == rule.name) throw ConfigError("rule '" + rule.name + "' already exists");
  }
  rules_.push_back(std::move(rule));
}

std::vector<QueryRule> ApiService::Rules() const {
  std::shared_lock lock(rules_mutex_);
  return rules_;
}

QueryRule ApiService::LookupRule(const std::string& id) const {
  std::shared_lock lock(rules_mutex_);
  for (const QueryRule& r : rules_) {
    if (r.name == id) return r;
  }
  Throw(404, "not-found", "no rule named '" + id + "'");
}

QueryRule ApiService::RuleFromRequest(const json& body, bool named) const {
  const std::string class_name = StringField(body, "class", true);
  const std::string text = StringField(body, "text", true);
  QueryRule rule;
  try {
    const RuleClass c = ParseRuleClass(class_name);
    rule = ParseRule(c, text);
    if (body.contains("severity")) {
      rule.severity = ParseSeverity(StringField(body, "severity", true));
    }
  } catch (const RuleError& e) {
    ApiError err{422, "invalid-rule", e.what()};
    err.diagnostics = json::array({DiagnosticJson(e.diagnostic())});
    throw err;
  } catch (const ConfigError& e) {
    Throw(400, "bad-request", e.what());
  }
  rule.name = named ? StringField(body, "name", true) : StringField(body, "name", false);
  rule.description = StringField(body, "description", false);
  if (rule.name.empty()) rule.name = "adhoc";
  return rule;
}

ApiResponse ApiService::Handle(const ApiRequest& request) {
  ApiResponse response;
  try {
    response = Route(request);
  } catch (const ApiError& e) {
    response.status = e.status;
    response.body = {{"error", {{"code", e.code}, {"message", e.message}}}};
    if (!e.diagnostics.is_null()) response.body["error"]["diagnostics"] = e.diagnostics;
  } catch (const MissingCounterfactualsError& e) {
    response.status = 409;
    response.body = {{"error", {{"code", "counterfactuals-missing"}, {"message", e.what()}}}};
  } catch (const RuleError& e) {
    response.status = 422;
    response.body = {{"error",
                      {{"code", "invalid-rule"},
                       {"message", e.what()},
                       {"diagnostics", json::array({DiagnosticJson(e.diagnostic())})}}}};
  } catch (const NotFoundError& e) {
    response.status = 404;
    response.body = {{"error", {{"code", "not-found"}, {"message", e.what()}}}};
  } catch (const ConfigError& e) {
    response.status = 400;
    response.body = {{"error", {{"code", "bad-request"}, {"message", e.what()}}}};
  } catch (const std::exception& e) {
    response.status = 500;
    response.body = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
  }
  response.body["schemaVersion"] = kApiSchemaVersion;
  response.body["snapshot"] = snapshot_id_;
  return response;
}

ApiResponse ApiService::Route(const ApiRequest& req) {
  const std::vector<std::string> p = SplitPath(req.path);
  if (p.size() < 2 || p[0] != "api" || p[1] != "v1") {
    Throw(404, "not-found", "unknown path " + req.path);
  }
  const std::vector<std::string> r(p.begin() + 2, p.end());
  const bool get = req.method == "GET", post = req.method == "POST";
  auto method_not_allowed = [&]() -> ApiResponse {
    Throw(405, "method-not-allowed", req.method + " is not supported on " + req.path);
  };
  auto query = [&](const std::string& key) -> std::string {
    auto it = req.query.find(key);
    return it == req.query.end() ? "" : it->second;
  };
  const TreeStore& store = *store_;

  if (r.size() == 1 && r[0] == "health") {
    if (!get) return method_not_allowed();
    return {200, {{"status", "ok"}, {"episodes", store.episodes().size()}}};
  }

  if (r.size() == 1 && r[0] == "catalog") {
    if (!get) return method_not_allowed();
    const SchemaCatalog& catalog = SchemaCatalog::Default();
    json body = CatalogJson(catalog);
    if (!query("namespace").empty() || !query("prefix").empty()) {
      auto ns = catalog.ResolveNamespace(query("namespace"));
      if (!ns) Throw(400, "bad-request", "unknown namespace '" + query("namespace") + "'");
      body["suggestions"] = catalog.Suggest(*ns, query("prefix"), 8);
    }
    return {200, body};
  }

  if (!r.empty() && r[0] == "episodes") {
    if (!get) return method_not_allowed();
    if (r.size() == 1) {
      json list = json::array();
      for (const EpisodeRow& e : store.episodes()) list.push_back(EpisodeJson(store, e));
      return {200, {{"episodes", list}}};
    }
    const EpisodeRow& e = store.episode(r[1]);
    if (r.size() == 2) {
      json body = EpisodeJson(store, e);
      body["statesPerDecision"] = store.Summary(e.id).states_per_decision;
      return {200, body};
    }
    if (r[2] != "decisions") Throw(404, "not-found", "unknown path " + req.path);
    if (r.size() == 3) {
      const EpisodeSummary s = store.Summary(e.id);
      json list = json::array();
      for (int d = 0; d < e.decisions(); ++d) {
        const RowId root = e.decision_states[d];
        list.push_back({{"decision", d},
                        {"states", s.states_per_decision[d]},
                        {"transitions", s.states_per_decision[d] - 1},
                        {"chosenAction", ToJson(e.chosen_actions[d])},
                        {"rootState", ToJson(store.StateAt(root))},
                        {"rootWinProb", ToJson(store.WinProbAt(root))}});
      }
      return {200, {{"episodeId", e.id}, {"decisions", list}}};
    }
    const long decision = ParseLong(r[3], "decision");
    if (decision < 0 || decision >= e.decisions()) {
      Throw(404, "not-found", "episode " + e.id + " has no decision " + r[3]);
    }
    const int d = static_cast<int>(decision);
    if (r.size() == 5 && r[4] == "tree") {
      const std::vector<RowId> rows = store.StatesOf(e.id, d);
      json nodes = json::array();
      for (size_t n = 0; n < rows.size(); ++n) {
        const RowId parent = store.states().parent_state[rows[n]];
        json node{{"node", n},
                  {"row", rows[n]},
                  {"parent", parent == kNoRow ? -1 : parent - rows.front()},
                  {"depth", store.states().depth[rows[n]]}};
        node.update(NodeDetails(store, rows[n]));
        nodes.push_back(std::move(node));
      }
      return {200, {{"episodeId", e.id}, {"decision", d}, {"nodes", nodes}}};
    }
    if (r.size() == 5 && r[4] == "slice") {
      QueryRule rule;
      if (!query("ruleId").empty()) {
        rule = LookupRule(query("ruleId"));
      } else {
        rule = RuleFromRequest({{"class", query("class")}, {"text", query("text")}}, false);
      }
      const std::string flag = query("modelPredictedOnly");
      const bool predicted = flag == "1" || flag == "true";
      const ViolationReport report = Evaluate(rule, store, e.id, {predicted});
      const TreeSlice slice = MakeTreeSlice(report, store, d);
      json body = ToJson(slice);
      for (json& node : body["nodes"]) node.update(NodeDetails(store, node["row"].get<RowId>()));
      body["ruleId"] = rule.name;
      body["matchesAtDecision"] = report.per_decision_counts.at(d);
      return {200, body};
    }
    Throw(404, "not-found", "unknown path " + req.path);
  }

  if (!r.empty() && r[0] == "rules") {
    if (r.size() == 1 && get) {
      json list = json::array();
      for (const QueryRule& rule : Rules()) list.push_back(RuleJson(rule));
      return {200, {{"rules", list}}};
    }
    if (r.size() == 1 && post) {
      QueryRule rule = RuleFromRequest(ParseBody(req.body), true);
      try {
        RegisterRule(rule);
      } catch (const ConfigError& e) {
        Throw(409, "conflict", e.what());
      }
      return {201, {{"rule", RuleJson(rule)}}};
    }
    if (r.size() == 2 && r[1] == "validate") {
      if (!post) return method_not_allowed();
      const QueryRule rule = RuleFromRequest(ParseBody(req.body), false);
      return {200, {{"valid", true},
                    {"diagnostics", json::array()},
                    {"canonical", PrettyPrint(rule)},
                    {"namespaces", [&] {
                       json ns = json::array();
                       for (Namespace n : rule.Namespaces()) ns.push_back(NamespaceName(n));
                       return ns;
                     }()}}};
    }
    if (r.size() == 2 && get) return {200, {{"rule", RuleJson(LookupRule(r[1]))}}};
    return method_not_allowed();
  }

  if (r.size() == 1 && r[0] == "evaluate") {
    if (!post) return method_not_allowed();
    const json body = ParseBody(req.body);
    QueryRule rule;
    if (body.contains("ruleId")) {
      rule = LookupRule(StringField(body, "ruleId", true));
    } else if (body.contains("rule") && body["rule"].is_object()) {
      rule = RuleFromRequest(body["rule"], false);
    } else {
      Throw(400, "bad-request", "give either 'ruleId' or a 'rule' object");
    }
    QueryScope scope;
    if (body.contains("episodeId")) scope.episode_ids = {StringField(body, "episodeId", true)};
    scope.options.model_predicted_only = body.value("modelPredictedOnly", false);
    const long page = body.value("page", 0L);
    const long page_size = body.value("pageSize", kDefaultPageSize);
    if (page < 0 || page_size < 1 || page_size > kMaxPageSize) {
      Throw(400, "bad-request", "page must be >= 0 and pageSize in [1, 1000]");
    }
    json reports = json::array();
    long total = 0, errors = 0, scanned = 0;
    for (const ViolationReport& report : Evaluate(rule, store, scope)) {
      json j = ToJson(report);
      const json& all = j["matches"];
      json paged = json::array();
      for (long i = page * page_size; i < std::min<long>(all.size(), (page + 1) * page_size); ++i) {
        paged.push_back(all[i]);
      }
      j["matches"] = std::move(paged);
      j["page"] = page;
      j["pageSize"] = page_size;
      j["pageCount"] = (report.total() + page_size - 1) / page_size;
      total += report.total();
      errors += report.evaluation_errors;
      scanned += report.total_rows_scanned;
      reports.push_back(std::move(j));
    }
    return {200, {{"rule", RuleJson(rule)},
                  {"totalMatches", total},
                  {"evaluationErrors", errors},
                  {"totalRowsScanned", scanned},
                  {"reports", reports}}};
  }

  Throw(404, "not-found", "unknown path " + req.path);
}

std::string SnapshotIdOfFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return HexDigest(HashBytes(bytes.str()));
}

struct HttpServer::Impl {
  ApiService& api;
  httplib::Server server;
};

HttpServer::HttpServer(ApiService& api) : impl_(new Impl{api, {}}) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query[k] = v;
    request.body = req.body;
    const ApiResponse response = impl_->api.Handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  const std::string pattern = std::string(kApiPrefix) + "(/.*)?";
  impl_->server.Get(pattern, handler);
  impl_->server.Post(pattern, handler);
  impl_->server.Put(pattern, handler);
  impl_->server.Delete(pattern, handler);
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::Serve() { impl_->server.listen_after_bind(); }

void HttpServer::Stop() {
  if (impl_) impl_->server.stop();
}

int PortFromEnvironment(int fallback) {
  const char* env = std::getenv("TUGCHECK_PORT");
  if (!env || !*env) return fallback;
  try {
    const int port = std::stoi(env);
    if (port > 0 && port < 65536) return port;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("TUGCHECK_PORT must be a port number, got '") + env + "'");
}

}  // namespace tugcheck
