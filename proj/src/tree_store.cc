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


#include "tugcheck/tree_store.h"

#include <cstring>
#include <fstream>
#include <type_traits>

#include "json.hpp"
#include "tugcheck/common.h"
#include "tugcheck/state_json.h"

namespace tugcheck {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'T', 'U', 'G', 'S', 'T', 'O', 'R', 'E'};

template <typename T>
void PutPod(std::ostream& out, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T GetPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated store snapshot");
  return v;
}

template <typename T>
void PutColumn(std::ostream& out, const std::vector<T>& column) {
  PutPod<std::uint64_t>(out, column.size());
  out.write(reinterpret_cast<const char*>(column.data()),
            static_cast<std::streamsize>(column.size() * sizeof(T)));
}

template <typename T>
void GetColumn(std::istream& in, std::vector<T>& column, std::uint64_t expected) {
  const auto n = GetPod<std::uint64_t>(in);
  if (n != expected) throw FormatError("store snapshot column length mismatch");
  column.resize(n);
  in.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw FormatError("truncated store snapshot");
}

void PutString(std::ostream& out, const std::string& s) {
  PutPod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream& in) {
  const auto n = GetPod<std::uint64_t>(in);
  if (n > (1ULL << 32)) throw FormatError("implausible string length in store snapshot");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw FormatError("truncated store snapshot");
  return s;
}

json EpisodeRowToJson(const EpisodeRow& e) {
  json chosen = json::array();
  for (const auto& a : e.chosen_actions) chosen.push_back(ToJson(a));
  json widths = json::array();
  for (const auto& w : e.widths) {
    widths.push_back({w.root_friendly, w.root_enemy, w.inner_friendly, w.inner_enemy});
  }
  return {{"id", e.id},
          {"isWin", e.is_win},
          {"waveCount", e.wave_count},
          {"configHash", e.config_hash},
          {"contentHash", e.content_hash},
          {"seed", e.seed},
          {"bundle", e.bundle},
          {"plannerSide", PlayerName(e.planner_side)},
          {"decisionStates", e.decision_states},
          {"decisionActions", e.decision_actions},
          {"chosen", chosen},
          {"widths", widths}};
}

EpisodeRow EpisodeRowFromJson(const json& j) {
  EpisodeRow e;
  e.id = j.at("id").get<std::string>();
  e.is_win = j.at("isWin").get<bool>();
  e.wave_count = j.at("waveCount").get<int>();
  e.config_hash = j.at("configHash").get<std::uint64_t>();
  e.content_hash = j.at("contentHash").get<std::uint64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.bundle = j.at("bundle").get<std::string>();
  e.planner_side = ParsePlayer(j.at("plannerSide").get<std::string>());
  e.decision_states = j.at("decisionStates").get<std::vector<RowId>>();
  e.decision_actions = j.at("decisionActions").get<std::vector<RowId>>();
  for (const auto& a : j.at("chosen")) e.chosen_actions.push_back(ActionFromJson(a));
  for (const auto& w : j.at("widths")) {
    e.widths.push_back({w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>(),
                        w.at(3).get<int>()});
  }
  return e;
}

void CheckRow(RowId row, size_t size, const char* table) {
  if (row < 0 || static_cast<size_t>(row) >= size) {
    throw NotFoundError(std::string("no ") + table + " row " + std::to_string(row));
  }
}

template <typename Columns>
StateAttributes GatherState(const Columns& columns, RowId row) {
  StateAttributes a{};
  for (int i = 0; i < kNumStateAttributes; ++i) a[i] = columns[i][row];
  return a;
}

template <typename Columns>
ActionPair GatherAction(const Columns& columns, RowId row) {
  std::array<int, kNumActionAttributes> a{};
  for (int i = 0; i < kNumActionAttributes; ++i) a[i] = columns[i][row];
  return UnflattenAction(a);
}

}  // namespace

IngestResult TreeStore::Ingest(const EpisodeArtifact& episode) {
  ValidateEpisode(episode);
  const std::uint64_t hash = ContentHash(episode);
  if (auto it = by_content_.find(hash); it != by_content_.end()) {
    return {episodes_[it->second].id, true, 0, 0, 0};
  }
  const int index = static_cast<int>(episodes_.size());
  EpisodeRow row;
  row.id = "e" + std::to_string(index + 1);
  row.is_win = episode.is_win;
  row.wave_count = episode.wave_count;
  row.config_hash = episode.config_hash;
  row.content_hash = hash;
  row.seed = episode.seed;
  row.bundle = episode.bundle;
  row.planner_side = episode.planner_side;

  IngestResult result{row.id, false, 0, 0, 0};
  for (size_t d = 0; d < episode.trees.size(); ++d) {
    const SearchTree& tree = episode.trees[d];
    const RowId first_state = static_cast<RowId>(states_.size());
    const RowId first_action = static_cast<RowId>(actions_.size());
    row.decision_states.push_back(first_state);
    row.decision_actions.push_back(first_action);
    row.chosen_actions.push_back(tree.chosen_action);
    row.widths.push_back(tree.widths);
    for (const TreeNode& n : tree.nodes) {
      const RowId id = first_state + n.id;
      const bool root = n.parent < 0;
      states_.episode.push_back(index);
      states_.decision.push_back(static_cast<std::int32_t>(d));
      states_.is_root.push_back(root);
      states_.depth.push_back(n.depth);
      states_.model_predicted.push_back(!root);
      states_.parent_state.push_back(root ? kNoRow : first_state + n.parent);
      states_.parent_action.push_back(root ? kNoRow : first_action + n.id - 1);
      const StateAttributes attrs = Flatten(n.state);
      for (int i = 0; i < kNumStateAttributes; ++i) states_.attributes[i].push_back(attrs[i]);
      states_.terminal.push_back(n.terminal);
      states_.friendly_index.push_back(n.friendly_index);
      states_.enemy_index.push_back(n.enemy_index);
      for (int i = 0; i < 4; ++i) states_.reward[i].push_back(n.reward[i]);
      states_.backed_up_value.push_back(n.backed_up_value);

      win_probs_.parent_state.push_back(id);
      for (int i = 0; i < kNumWinProbAttributes; ++i) {
        win_probs_.values[i].push_back(n.win_probabilities[i]);
      }
      if (!root) {
        actions_.parent_state.push_back(first_state + n.parent);
        actions_.child_state.push_back(id);
        const auto a = FlattenAction(*n.parent_actions);
        for (int i = 0; i < kNumActionAttributes; ++i) actions_.attributes[i].push_back(a[i]);
        ++result.actions;
      }
      ++result.states;
      ++result.win_probs;
    }
  }
  row.decision_states.push_back(static_cast<RowId>(states_.size()));
  row.decision_actions.push_back(static_cast<RowId>(actions_.size()));
  for (auto& cf : counterfactuals_) {
    cf.twin.resize(states_.size(), kNoRow);
    cf.materialized.push_back(0);
  }
  by_content_[hash] = index;
  episodes_.push_back(std::move(row));
  return result;
}

long TreeStore::MaterializeCounterfactuals(const std::string& episode_id,
                                           const ModelBundle& bundle, Transform transform) {
  const int index = EpisodeIndex(episode_id);
  CounterfactualTable& cf = counterfactuals_[static_cast<int>(transform)];
  if (cf.materialized[index]) return 0;
  const EpisodeRow& e = episodes_[index];
  long added = 0;
  for (RowId row = e.decision_states.front(); row < e.decision_states.back(); ++row) {
    if (states_.is_root[row]) continue;
    const AbstractState input = Apply(transform, StateAt(states_.parent_state[row]));
    const ActionPair actions = Apply(transform, ActionAt(states_.parent_action[row]));
    const TransitionPrediction pred =
        bundle.PredictTransition(input, actions.friendly, actions.enemy);
    const QVector value = bundle.StateValueVector(pred.state);
    cf.twin[row] = static_cast<RowId>(cf.origin.size());
    cf.origin.push_back(row);
    const StateAttributes attrs = Flatten(pred.state);
    for (int i = 0; i < kNumStateAttributes; ++i) cf.attributes[i].push_back(attrs[i]);
    const auto a = FlattenAction(actions);
    for (int i = 0; i < kNumActionAttributes; ++i) cf.action[i].push_back(a[i]);
    for (int i = 0; i < kNumWinProbAttributes; ++i) cf.win_prob[i].push_back(value[i]);
    ++added;
  }
  cf.materialized[index] = 1;
  return added;
}

bool TreeStore::HasCounterfactuals(int episode_index, Transform transform) const {
  const auto& m = counterfactuals_[static_cast<int>(transform)].materialized;
  return episode_index >= 0 && static_cast<size_t>(episode_index) < m.size() &&
         m[episode_index] != 0;
}

int TreeStore::EpisodeIndex(const std::string& id) const {
  if (id.size() > 1 && id[0] == 'e') {
    try {
      size_t used = 0;
      const long n = std::stol(id.substr(1), &used);
      if (used == id.size() - 1 && n >= 1 && static_cast<size_t>(n) <= episodes_.size()) {
        return static_cast<int>(n - 1);
      }
    } catch (const std::exception&) {
    }
  }
  throw NotFoundError("unknown episode '" + id + "'");
}

AbstractState TreeStore::StateAt(RowId row) const {
  CheckRow(row, states_.size(), "state");
  return Unflatten(GatherState(states_.attributes, row));
}

ActionPair TreeStore::ActionAt(RowId row) const {
  CheckRow(row, actions_.size(), "action");
  return GatherAction(actions_.attributes, row);
}

QVector TreeStore::WinProbAt(RowId row) const {
  CheckRow(row, win_probs_.size(), "win probability");
  QVector v{};
  for (int i = 0; i < kNumWinProbAttributes; ++i) v[i] = win_probs_.values[i][row];
  return v;
}

AbstractState TreeStore::CounterfactualStateAt(Transform t, RowId row) const {
  const auto& cf = counterfactuals(t);
  CheckRow(row, cf.size(), "counterfactual");
  return Unflatten(GatherState(cf.attributes, row));
}

ActionPair TreeStore::CounterfactualActionAt(Transform t, RowId row) const {
  const auto& cf = counterfactuals(t);
  CheckRow(row, cf.size(), "counterfactual");
  return GatherAction(cf.action, row);
}

QVector TreeStore::CounterfactualWinProbAt(Transform t, RowId row) const {
  const auto& cf = counterfactuals(t);
  CheckRow(row, cf.size(), "counterfactual");
  QVector v{};
  for (int i = 0; i < kNumWinProbAttributes; ++i) v[i] = cf.win_prob[i][row];
  return v;
}

void TreeStore::CheckDecision(const EpisodeRow& e, int decision) const {
  if (decision < 0 || decision >= e.decisions()) {
    throw NotFoundError("episode " + e.id + " has no decision " + std::to_string(decision));
  }
}

std::vector<RowId> TreeStore::StatesOf(const std::string& episode_id, int decision) const {
  const EpisodeRow& e = episode(episode_id);
  CheckDecision(e, decision);
  std::vector<RowId> out;
  for (RowId r = e.decision_states[decision]; r < e.decision_states[decision + 1]; ++r) {
    out.push_back(r);
  }
  return out;
}

std::vector<Transition> TreeStore::TransitionsOf(const std::string& episode_id,
                                                 int decision) const {
  std::vector<Transition> out;
  for (RowId r : StatesOf(episode_id, decision)) {
    if (states_.is_root[r]) continue;
    out.push_back({states_.parent_state[r], states_.parent_action[r], r});
  }
  return out;
}

EpisodeSummary TreeStore::Summary(const std::string& episode_id) const {
  const EpisodeRow& e = episode(episode_id);
  EpisodeSummary s{e.id, e.is_win, e.wave_count, e.decisions(), 0, 0, {}};
  for (int d = 0; d < e.decisions(); ++d) {
    const long n = e.decision_states[d + 1] - e.decision_states[d];
    s.states_per_decision.push_back(n);
    s.states += n;
    s.transitions += e.decision_actions[d + 1] - e.decision_actions[d];
  }
  return s;
}

SearchTree TreeStore::ReconstructTree(const std::string& episode_id, int decision) const {
  const EpisodeRow& e = episode(episode_id);
  CheckDecision(e, decision);
  SearchTree t;
  t.episode_id = e.id;
  t.decision_index = decision;
  t.root = 0;
  t.chosen_action = e.chosen_actions[decision];
  t.widths = e.widths[decision];
  const RowId first = e.decision_states[decision];
  for (RowId r = first; r < e.decision_states[decision + 1]; ++r) {
    TreeNode n;
    n.id = static_cast<int>(r - first);
    n.depth = states_.depth[r];
    n.parent = states_.is_root[r] ? -1 : static_cast<int>(states_.parent_state[r] - first);
    n.state = StateAt(r);
    n.win_probabilities = WinProbAt(r);
    if (!states_.is_root[r]) n.parent_actions = ActionAt(states_.parent_action[r]);
    n.friendly_index = states_.friendly_index[r];
    n.enemy_index = states_.enemy_index[r];
    for (int i = 0; i < 4; ++i) n.reward[i] = states_.reward[i][r];
    n.terminal = states_.terminal[r] != 0;
    n.backed_up_value = states_.backed_up_value[r];
    if (n.parent >= 0) t.nodes[n.parent].children.push_back(n.id);
    t.nodes.push_back(std::move(n));
  }
  return t;
}

void TreeStore::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write store snapshot " + path);
  out.write(kMagic, sizeof(kMagic));
  PutPod<std::uint32_t>(out, kStoreFormatVersion);
  json episodes = json::array();
  for (const auto& e : episodes_) episodes.push_back(EpisodeRowToJson(e));
  PutString(out, episodes.dump());

  PutPod<std::uint64_t>(out, states_.size());
  PutColumn(out, states_.episode);
  PutColumn(out, states_.decision);
  PutColumn(out, states_.is_root);
  PutColumn(out, states_.depth);
  PutColumn(out, states_.model_predicted);
  PutColumn(out, states_.parent_state);
  PutColumn(out, states_.parent_action);
  for (const auto& c : states_.attributes) PutColumn(out, c);
  PutColumn(out, states_.terminal);
  PutColumn(out, states_.friendly_index);
  PutColumn(out, states_.enemy_index);
  for (const auto& c : states_.reward) PutColumn(out, c);
  PutColumn(out, states_.backed_up_value);

  PutPod<std::uint64_t>(out, actions_.size());
  PutColumn(out, actions_.parent_state);
  PutColumn(out, actions_.child_state);
  for (const auto& c : actions_.attributes) PutColumn(out, c);

  PutPod<std::uint64_t>(out, win_probs_.size());
  PutColumn(out, win_probs_.parent_state);
  for (const auto& c : win_probs_.values) PutColumn(out, c);

  for (const auto& cf : counterfactuals_) {
    PutPod<std::uint64_t>(out, cf.size());
    PutColumn(out, cf.origin);
    for (const auto& c : cf.attributes) PutColumn(out, c);
    for (const auto& c : cf.action) PutColumn(out, c);
    for (const auto& c : cf.win_prob) PutColumn(out, c);
    PutColumn(out, cf.twin);
    PutColumn(out, cf.materialized);
  }
  if (!out) throw Error("failed writing store snapshot " + path);
}

TreeStore TreeStore::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open store snapshot " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path + ": not a store snapshot");
  }
  if (GetPod<std::uint32_t>(in) != kStoreFormatVersion) {
    throw FormatError(path + ": unsupported store snapshot version");
  }
  TreeStore store;
  json episodes = json::parse(GetString(in), nullptr, false);
  if (episodes.is_discarded() || !episodes.is_array()) {
    throw FormatError(path + ": bad episode table");
  }
  try {
    for (const auto& j : episodes) {
      store.by_content_[j.at("contentHash").get<std::uint64_t>()] =
          static_cast<int>(store.episodes_.size());
      store.episodes_.push_back(EpisodeRowFromJson(j));
    }
  } catch (const std::exception& e) {
    throw FormatError(path + ": bad episode table: " + e.what());
  }

  StatesTable& s = store.states_;
  const auto ns = GetPod<std::uint64_t>(in);
  GetColumn(in, s.episode, ns);
  GetColumn(in, s.decision, ns);
  GetColumn(in, s.is_root, ns);
  GetColumn(in, s.depth, ns);
  GetColumn(in, s.model_predicted, ns);
  GetColumn(in, s.parent_state, ns);
  GetColumn(in, s.parent_action, ns);
  for (auto& c : s.attributes) GetColumn(in, c, ns);
  GetColumn(in, s.terminal, ns);
  GetColumn(in, s.friendly_index, ns);
  GetColumn(in, s.enemy_index, ns);
  for (auto& c : s.reward) GetColumn(in, c, ns);
  GetColumn(in, s.backed_up_value, ns);

  ActionsTable& a = store.actions_;
  const auto na = GetPod<std::uint64_t>(in);
  GetColumn(in, a.parent_state, na);
  GetColumn(in, a.child_state, na);
  for (auto& c : a.attributes) GetColumn(in, c, na);

  WinProbTable& w = store.win_probs_;
  const auto nw = GetPod<std::uint64_t>(in);
  GetColumn(in, w.parent_state, nw);
  for (auto& c : w.values) GetColumn(in, c, nw);

  for (auto& cf : store.counterfactuals_) {
    const auto nc = GetPod<std::uint64_t>(in);
    GetColumn(in, cf.origin, nc);
    for (auto& c : cf.attributes) GetColumn(in, c, nc);
    for (auto& c : cf.action) GetColumn(in, c, nc);
    for (auto& c : cf.win_prob) GetColumn(in, c, nc);
    GetColumn(in, cf.twin, ns);
    GetColumn(in, cf.materialized, store.episodes_.size());
  }
  return store;
}

}  // namespace tugcheck
