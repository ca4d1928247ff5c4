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


// In-memory columnar store of episodes and their search trees.
//
// Tables (row id == index into every column of the table):
//   episodes        one row per ingested artifact, external id "e<N>"
//   states          one row per tree node
//   actions         one row per non-root node: the action pair leading to it
//   win_probs       one row per state, same id as the state row
//   counterfactual  per transform, one row per non-root state: the bundle's
//                   prediction for the transformed parent state and action
//                   pair, linked to the original row through `origin`
//
// Rows of one decision point are contiguous and in tree node order, so a
// state row's node id is its offset from the decision's first row.

#ifndef TUGCHECK_TREE_STORE_H_
#define TUGCHECK_TREE_STORE_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tugcheck/episode.h"
#include "tugcheck/models.h"
#include "tugcheck/schema.h"
#include "tugcheck/symmetry.h"

namespace tugcheck {

inline constexpr int kStoreFormatVersion = 1;

using RowId = std::int64_t;
inline constexpr RowId kNoRow = -1;

struct EpisodeRow {
  std::string id;
  bool is_win = false;
  int wave_count = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t content_hash = 0;
  std::uint64_t seed = 0;
  std::string bundle;
  Player planner_side = Player::kFriendly;
  // decision_states[d] is the first state row of decision d; one extra
  // trailing entry closes the last range. Same for actions.
  std::vector<RowId> decision_states;
  std::vector<RowId> decision_actions;
  std::vector<PurchaseAction> chosen_actions;
  std::vector<PruneWidths> widths;
  int decisions() const { return static_cast<int>(chosen_actions.size()); }
};

struct StatesTable {
  std::vector<std::int32_t> episode;  // index into the episodes table
  std::vector<std::int32_t> decision;
  std::vector<std::int32_t> is_root;
  std::vector<std::int32_t> depth;
  std::vector<std::int32_t> model_predicted;
  std::vector<RowId> parent_state;   // kNoRow on roots
  std::vector<RowId> parent_action;  // kNoRow on roots
  std::array<std::vector<std::int32_t>, kNumStateAttributes> attributes;
  std::vector<std::int32_t> terminal;
  std::vector<std::int32_t> friendly_index;
  std::vector<std::int32_t> enemy_index;
  std::array<std::vector<double>, 4> reward;
  std::vector<double> backed_up_value;

  size_t size() const { return episode.size(); }
};

struct ActionsTable {
  std::vector<RowId> parent_state;
  std::vector<RowId> child_state;
  std::array<std::vector<std::int32_t>, kNumActionAttributes> attributes;

  size_t size() const { return parent_state.size(); }
};

struct WinProbTable {
  std::vector<RowId> parent_state;
  std::array<std::vector<double>, kNumWinProbAttributes> values;

  size_t size() const { return parent_state.size(); }
};

struct CounterfactualTable {
  std::vector<RowId> origin;  // original output state row
  std::array<std::vector<std::int32_t>, kNumStateAttributes> attributes;
  std::array<std::vector<std::int32_t>, kNumActionAttributes> action;
  std::array<std::vector<double>, kNumWinProbAttributes> win_prob;
  // Original state row -> twin row, kNoRow when absent. Sized like states.
  std::vector<RowId> twin;
  std::vector<std::int32_t> materialized;  // per episode index, 0/1

  size_t size() const { return origin.size(); }
};

struct IngestResult {
  std::string episode_id;
  bool duplicate = false;
  long states = 0;
  long actions = 0;
  long win_probs = 0;
};

struct Transition {
  RowId input_state = kNoRow;
  RowId action = kNoRow;
  RowId output_state = kNoRow;
};

struct EpisodeSummary {
  std::string id;
  bool is_win = false;
  int wave_count = 0;
  int decisions = 0;
  long states = 0;
  long transitions = 0;
  std::vector<long> states_per_decision;
};

class TreeStore {
 public:
  // Idempotent: an artifact with a known content hash returns the existing
  // id without adding rows. Validates the artifact first.
  IngestResult Ingest(const EpisodeArtifact& episode);

  // Returns the number of rows added; zero when already materialized.
  long MaterializeCounterfactuals(const std::string& episode_id, const ModelBundle& bundle,
                                  Transform transform);
  bool HasCounterfactuals(int episode_index, Transform transform) const;

  const std::vector<EpisodeRow>& episodes() const { return episodes_; }
  // Throws NotFoundError.
  int EpisodeIndex(const std::string& id) const;
  const EpisodeRow& episode(const std::string& id) const { return episodes_[EpisodeIndex(id)]; }

  const StatesTable& states() const { return states_; }
  const ActionsTable& actions() const { return actions_; }
  const WinProbTable& win_probs() const { return win_probs_; }
  const CounterfactualTable& counterfactuals(Transform t) const {
    return counterfactuals_[static_cast<int>(t)];
  }

  // Row accessors; throw NotFoundError on unknown ids.
  AbstractState StateAt(RowId row) const;
  ActionPair ActionAt(RowId row) const;
  QVector WinProbAt(RowId row) const;
  AbstractState CounterfactualStateAt(Transform t, RowId row) const;
  ActionPair CounterfactualActionAt(Transform t, RowId row) const;
  QVector CounterfactualWinProbAt(Transform t, RowId row) const;

  // Rows of one decision point in node order (breadth first, so by depth).
  std::vector<RowId> StatesOf(const std::string& episode_id, int decision) const;
  std::vector<Transition> TransitionsOf(const std::string& episode_id, int decision) const;
  EpisodeSummary Summary(const std::string& episode_id) const;
  SearchTree ReconstructTree(const std::string& episode_id, int decision) const;

  // Binary snapshot: magic, version, then length-prefixed columns.
  void Save(const std::string& path) const;
  static TreeStore Load(const std::string& path);

 private:
  void CheckDecision(const EpisodeRow& e, int decision) const;

  std::vector<EpisodeRow> episodes_;
  std::map<std::uint64_t, int> by_content_;
  StatesTable states_;
  ActionsTable actions_;
  WinProbTable win_probs_;
  std::array<CounterfactualTable, 2> counterfactuals_;
};

}  // namespace tugcheck

#endif  // TUGCHECK_TREE_STORE_H_
