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


#include "tugcheck/query_engine.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tugcheck {

using nlohmann::json;

namespace {

enum class Truth : std::uint8_t { kFalse, kTrue, kError };

struct Rows {
  RowId input = kNoRow;
  RowId action = kNoRow;
  RowId output = kNoRow;
  RowId twin = kNoRow;
};

class Evaluator {
 public:
  Evaluator(const TreeStore& store, const CounterfactualTable* cf) : store_(store), cf_(cf) {}

  Truth Test(const Expr& e, const Rows& rows) const {
    switch (e.kind) {
      case ExprKind::kNot: {
        const Truth t = Test(*e.lhs, rows);
        if (t == Truth::kError) return t;
        return t == Truth::kTrue ? Truth::kFalse : Truth::kTrue;
      }
      case ExprKind::kAnd: {
        const Truth l = Test(*e.lhs, rows);
        return l == Truth::kTrue ? Test(*e.rhs, rows) : l;
      }
      case ExprKind::kOr: {
        const Truth l = Test(*e.lhs, rows);
        return l == Truth::kFalse ? Test(*e.rhs, rows) : l;
      }
      case ExprKind::kCompare: {
        double a = 0, b = 0;
        if (!Value(*e.lhs, rows, &a) || !Value(*e.rhs, rows, &b)) return Truth::kError;
        bool r = false;
        switch (e.op) {
          case Op::kLt: r = a < b; break;
          case Op::kLe: r = a <= b; break;
          case Op::kEq: r = a == b; break;
          case Op::kNe: r = a != b; break;
          case Op::kGt: r = a > b; break;
          case Op::kGe: r = a >= b; break;
          default: break;
        }
        return r ? Truth::kTrue : Truth::kFalse;
      }
      default:
        return Truth::kError;
    }
  }

 private:
  // False on division by zero or a non-finite intermediate.
  bool Value(const Expr& e, const Rows& rows, double* out) const {
    switch (e.kind) {
      case ExprKind::kNumber:
        *out = e.value;
        return true;
      case ExprKind::kAttribute:
        *out = Attribute(e.ref, rows);
        return true;
      case ExprKind::kNegate:
        if (!Value(*e.lhs, rows, out)) return false;
        *out = -*out;
        return true;
      case ExprKind::kArithmetic: {
        double a = 0, b = 0;
        if (!Value(*e.lhs, rows, &a) || !Value(*e.rhs, rows, &b)) return false;
        switch (e.op) {
          case Op::kAdd: *out = a + b; break;
          case Op::kSub: *out = a - b; break;
          case Op::kMul: *out = a * b; break;
          case Op::kDiv:
            if (b == 0) return false;
            *out = a / b;
            break;
          default: return false;
        }
        return std::isfinite(*out);
      }
      default:
        return false;
    }
  }

  double Attribute(const AttributeRef& ref, const Rows& rows) const {
    switch (ref.ns) {
      case Namespace::kAction:
        return store_.actions().attributes[ref.column][rows.action];
      case Namespace::kFlippedOutput:
      case Namespace::kReversedOutput:
        return ref.kind == ColumnKind::kState ? cf_->attributes[ref.column][rows.twin]
                                              : cf_->win_prob[ref.column][rows.twin];
      default: {
        const RowId row = ref.ns == Namespace::kInputState ? rows.input : rows.output;
        return ref.kind == ColumnKind::kState ? store_.states().attributes[ref.column][row]
                                              : store_.win_probs().values[ref.column][row];
      }
    }
  }

  const TreeStore& store_;
  const CounterfactualTable* cf_;
};

void CheckResolves(const QueryRule& rule) {
  if (!rule.expr) throw ConfigError("rule " + rule.name + " has no expression");
  auto diags = ValidateAgainstCatalog(rule, SchemaCatalog::Default());
  if (!diags.empty()) throw RuleError(diags.front());
}

void CheckClass(const QueryRule& rule, std::initializer_list<RuleClass> allowed, const char* op) {
  if (std::find(allowed.begin(), allowed.end(), rule.rule_class) == allowed.end()) {
    throw ConfigError(std::string(op) + " cannot evaluate " + RuleClassName(rule.rule_class) +
                      " rule " + rule.name);
  }
}

ViolationReport NewReport(const QueryRule& rule, const EpisodeRow& e) {
  ViolationReport r;
  r.rule_id = rule.name;
  r.rule_class = rule.rule_class;
  r.severity = rule.severity;
  r.episode_id = e.id;
  for (int d = 0; d < e.decisions(); ++d) r.per_decision_counts[d] = 0;
  return r;
}

// Shared scan over the state rows of one episode.
ViolationReport Scan(const QueryRule& rule, const TreeStore& store, const std::string& episode_id,
                     const EvalOptions& options, const CounterfactualTable* cf) {
  CheckResolves(rule);
  const EpisodeRow& e = store.episode(episode_id);
  ViolationReport report = NewReport(rule, e);
  const StatesTable& st = store.states();
  const bool paths = rule.rule_class != RuleClass::kStaticState;
  const Evaluator eval(store, cf);
  const RowId begin = e.decision_states.front(), end = e.decision_states.back();
  for (RowId r = begin; r < end; ++r) {
    if (paths && st.is_root[r]) continue;
    if (options.model_predicted_only && !st.model_predicted[r]) continue;
    Rows rows;
    rows.output = r;
    if (paths) {
      rows.input = st.parent_state[r];
      rows.action = st.parent_action[r];
    }
    if (cf) {
      rows.twin = cf->twin[r];
      if (rows.twin == kNoRow) {
        throw MissingCounterfactualsError("state row " + std::to_string(r) + " has no twin");
      }
    }
    ++report.total_rows_scanned;
    const Truth t = eval.Test(*rule.expr, rows);
    if (t == Truth::kError) {
      ++report.evaluation_errors;
    } else if (t == Truth::kTrue) {
      const int d = st.decision[r];
      report.matches.push_back({d, rows.input, rows.action, r, rows.twin});
      ++report.per_decision_counts[d];
    }
  }
  return report;
}

}  // namespace

Transform RuleTransform(RuleClass c) {
  if (c == RuleClass::kSymmetryFlip) return Transform::kFlipLanes;
  if (c == RuleClass::kSymmetryReverse) return Transform::kReversePlayers;
  throw ConfigError(std::string(RuleClassName(c)) + " rules have no transform");
}

ViolationReport EvaluateStatic(const QueryRule& rule, const TreeStore& store,
                               const std::string& episode_id, const EvalOptions& options) {
  CheckClass(rule, {RuleClass::kStaticState}, "EvaluateStatic");
  return Scan(rule, store, episode_id, options, nullptr);
}

ViolationReport EvaluateTransition(const QueryRule& rule, const TreeStore& store,
                                   const std::string& episode_id, const EvalOptions& options) {
  CheckClass(rule, {RuleClass::kTransition}, "EvaluateTransition");
  return Scan(rule, store, episode_id, options, nullptr);
}

ViolationReport EvaluateSymmetry(const QueryRule& rule, const TreeStore& store,
                                 const std::string& episode_id, const EvalOptions& options) {
  CheckClass(rule, {RuleClass::kSymmetryFlip, RuleClass::kSymmetryReverse}, "EvaluateSymmetry");
  const Transform t = RuleTransform(rule.rule_class);
  const int index = store.EpisodeIndex(episode_id);
  if (!store.HasCounterfactuals(index, t)) {
    throw MissingCounterfactualsError("episode " + episode_id + " has no " + TransformName(t) +
                                      " counterfactuals; materialize first");
  }
  return Scan(rule, store, episode_id, options, &store.counterfactuals(t));
}

ViolationReport Evaluate(const QueryRule& rule, const TreeStore& store,
                         const std::string& episode_id, const EvalOptions& options) {
  switch (rule.rule_class) {
    case RuleClass::kStaticState: return EvaluateStatic(rule, store, episode_id, options);
    case RuleClass::kTransition: return EvaluateTransition(rule, store, episode_id, options);
    default: return EvaluateSymmetry(rule, store, episode_id, options);
  }
}

std::vector<ViolationReport> Evaluate(const QueryRule& rule, const TreeStore& store,
                                      const QueryScope& scope) {
  std::vector<std::string> ids = scope.episode_ids;
  if (ids.empty()) {
    for (const EpisodeRow& e : store.episodes()) ids.push_back(e.id);
  }
  std::vector<ViolationReport> out;
  for (const std::string& id : ids) out.push_back(Evaluate(rule, store, id, scope.options));
  return out;
}

TreeSlice MakeTreeSlice(const ViolationReport& report, const TreeStore& store, int decision) {
  if (!report.per_decision_counts.count(decision)) {
    throw NotFoundError("decision " + std::to_string(decision) + " is not in the report for " +
                        report.episode_id);
  }
  const std::vector<RowId> rows = store.StatesOf(report.episode_id, decision);
  const RowId first = rows.front();
  const StatesTable& st = store.states();
  TreeSlice slice;
  slice.episode_id = report.episode_id;
  slice.decision = decision;
  slice.tree_size = static_cast<long>(rows.size());

  std::vector<int> matches(rows.size(), 0);
  for (const Match& m : report.matches) {
    if (m.decision == decision) ++matches[m.output_state - first];
  }
  std::vector<char> on_path(rows.size(), 0);
  on_path[0] = 1;
  for (size_t n = 0; n < rows.size(); ++n) {
    if (!matches[n]) continue;
    for (RowId r = rows[n]; r != kNoRow && !on_path[r - first]; r = st.parent_state[r]) {
      on_path[r - first] = 1;
    }
  }
  for (size_t n = 0; n < rows.size(); ++n) {
    const RowId r = rows[n];
    const RowId parent = st.parent_state[r];
    const bool path = on_path[n];
    const bool stub = !path && parent != kNoRow && on_path[parent - first];
    if (!path && !stub) continue;
    SliceNode node;
    node.row = r;
    node.node = static_cast<int>(n);
    node.parent = parent == kNoRow ? -1 : static_cast<int>(parent - first);
    node.depth = st.depth[r];
    node.highlighted = matches[n] > 0;
    node.on_path = path;
    node.stub = stub;
    node.match_count = matches[n];
    slice.nodes.push_back(node);
  }
  return slice;
}

json ToJson(const ViolationReport& report) {
  json counts = json::object();
  for (const auto& [d, c] : report.per_decision_counts) counts[std::to_string(d)] = c;
  json matches = json::array();
  for (const Match& m : report.matches) {
    json j{{"decision", m.decision}, {"outputState", m.output_state}};
    if (m.input_state != kNoRow) j["inputState"] = m.input_state;
    if (m.action != kNoRow) j["action"] = m.action;
    if (m.counterfactual != kNoRow) j["counterfactual"] = m.counterfactual;
    matches.push_back(std::move(j));
  }
  return {{"ruleId", report.rule_id},
          {"ruleClass", RuleClassName(report.rule_class)},
          {"severity", SeverityName(report.severity)},
          {"episodeId", report.episode_id},
          {"totalMatches", report.total()},
          {"evaluationErrors", report.evaluation_errors},
          {"totalRowsScanned", report.total_rows_scanned},
          {"perDecisionCounts", counts},
          {"matches", matches}};
}

json ToJson(const TreeSlice& slice) {
  json nodes = json::array();
  for (const SliceNode& n : slice.nodes) {
    nodes.push_back({{"row", n.row},
                     {"node", n.node},
                     {"parent", n.parent},
                     {"depth", n.depth},
                     {"highlighted", n.highlighted},
                     {"onPath", n.on_path},
                     {"stub", n.stub},
                     {"matchCount", n.match_count}});
  }
  return {{"episodeId", slice.episode_id},
          {"decision", slice.decision},
          {"treeSize", slice.tree_size},
          {"nodes", nodes}};
}

void WriteReportJsonl(const ViolationReport& report, std::ostream& out) {
  json header = ToJson(report);
  const json matches = std::move(header["matches"]);
  header.erase("matches");
  header["type"] = "report";
  out << header.dump() << '\n';
  for (const json& m : matches) {
    json line = m;
    line["type"] = "match";
    line["ruleId"] = report.rule_id;
    line["episodeId"] = report.episode_id;
    out << line.dump() << '\n';
  }
}

std::string FormatSummaryTable(const std::vector<ViolationReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-16s %-9s %-8s %8s %7s %8s  %s\n", "rule", "class",
                "severity", "episode", "matches", "errors", "scanned", "per-decision");
  out << line;
  for (const ViolationReport& r : reports) {
    std::string histogram;
    for (const auto& [d, c] : r.per_decision_counts) {
      if (!histogram.empty()) histogram += ' ';
      histogram += std::to_string(c);
    }
    std::snprintf(line, sizeof(line), "%-24s %-16s %-9s %-8s %8ld %7ld %8ld  ", r.rule_id.c_str(),
                  RuleClassName(r.rule_class), SeverityName(r.severity), r.episode_id.c_str(),
                  r.total(), r.evaluation_errors, r.total_rows_scanned);
    out << line << histogram << '\n';
  }
  return out.str();
}

}  // namespace tugcheck
