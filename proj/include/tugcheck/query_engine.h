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


// Rule evaluation over a tree store.
//
// staticState rules select state rows. transition rules range over every
// (input state, action pair, output state) path, i.e. every non-root state
// row joined to its parent and the action row leading to it. Symmetry rules
// additionally join the output row to its counterfactual twin for the
// rule's transform. In every class `winProb.*` reads the output row.

#ifndef TUGCHECK_QUERY_ENGINE_H_
#define TUGCHECK_QUERY_ENGINE_H_

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tugcheck/rule_dsl.h"
#include "tugcheck/tree_store.h"

namespace tugcheck {

// A symmetry rule ran against an episode whose counterfactual rows for the
// rule's transform were never materialized.
class MissingCounterfactualsError : public Error {
 public:
  using Error::Error;
};

struct Match {
  int decision = 0;
  RowId input_state = kNoRow;  // kNoRow for staticState rules
  RowId action = kNoRow;       // kNoRow for staticState rules
  RowId output_state = kNoRow;
  RowId counterfactual = kNoRow;  // symmetry rules only

  bool operator==(const Match&) const = default;
};

struct ViolationReport {
  std::string rule_id;
  RuleClass rule_class = RuleClass::kStaticState;
  Severity severity = Severity::kSound;
  std::string episode_id;
  // Every decision of the episode, zero counts included.
  std::map<int, long> per_decision_counts;
  std::vector<Match> matches;  // ordered by output row id
  long evaluation_errors = 0;  // rows where evaluation divided by zero
  long total_rows_scanned = 0;

  long total() const { return static_cast<long>(matches.size()); }
};

struct EvalOptions {
  bool model_predicted_only = false;  // skip observed root states
};

struct QueryScope {
  std::vector<std::string> episode_ids;  // empty selects every episode
  EvalOptions options;
};

// Each throws ConfigError when the rule class does not fit, RuleError when a
// reference no longer resolves against the catalog, NotFoundError for an
// unknown episode.
ViolationReport EvaluateStatic(const QueryRule& rule, const TreeStore& store,
                               const std::string& episode_id, const EvalOptions& options = {});
ViolationReport EvaluateTransition(const QueryRule& rule, const TreeStore& store,
                                   const std::string& episode_id,
                                   const EvalOptions& options = {});
// Also throws MissingCounterfactualsError.
ViolationReport EvaluateSymmetry(const QueryRule& rule, const TreeStore& store,
                                 const std::string& episode_id, const EvalOptions& options = {});

// Dispatches on the rule class.
ViolationReport Evaluate(const QueryRule& rule, const TreeStore& store,
                         const std::string& episode_id, const EvalOptions& options = {});
// One report per episode in scope, in store order.
std::vector<ViolationReport> Evaluate(const QueryRule& rule, const TreeStore& store,
                                      const QueryScope& scope);

Transform RuleTransform(RuleClass c);  // symmetry classes only

struct SliceNode {
  RowId row = kNoRow;
  int node = 0;
  int parent = -1;  // node id
  int depth = 0;
  bool highlighted = false;  // the output row of at least one match
  bool on_path = false;      // root or an ancestor of a highlighted node
  bool stub = false;         // compact sibling, shown without its subtree
  int match_count = 0;
};

struct TreeSlice {
  std::string episode_id;
  int decision = 0;
  long tree_size = 0;
  std::vector<SliceNode> nodes;  // node id order
};

// The root-to-match paths of one decision point, plus every other child of a
// path node as a stub. With no matches: the root and its children.
// Throws NotFoundError when the decision is not in the report.
TreeSlice MakeTreeSlice(const ViolationReport& report, const TreeStore& store, int decision);

nlohmann::json ToJson(const ViolationReport& report);
nlohmann::json ToJson(const TreeSlice& slice);

// Line-delimited export: a report header line, then one line per match.
void WriteReportJsonl(const ViolationReport& report, std::ostream& out);

// Fixed-width table: rule, class, severity, episode, matches, errors,
// scanned, and the per-decision histogram.
std::string FormatSummaryTable(const std::vector<ViolationReport>& reports);

}  // namespace tugcheck

#endif  // TUGCHECK_QUERY_ENGINE_H_
