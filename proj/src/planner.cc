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

#include "tugcheck/planner.h"

#include <algorithm>
#include <map>

#include "tugcheck/common.h"

namespace tugcheck {

namespace {

void Expand(const ModelBundle& bundle, SearchTree& tree, int parent_id, int friendly_width,
            int enemy_width) {
  const AbstractState parent_state = tree.nodes[parent_id].state;
  const auto friendly = bundle.RankActions(parent_state, Player::kFriendly, friendly_width);
  const auto enemy = bundle.RankActions(parent_state, Player::kEnemy, enemy_width);
  for (const auto& f : friendly) {
    for (const auto& e : enemy) {
      TreeNode child;
      child.id = static_cast<int>(tree.nodes.size());
      child.depth = tree.nodes[parent_id].depth + 1;
      child.parent = parent_id;
      child.parent_actions = ActionPair{f.action, e.action};
      child.friendly_index = f.enumeration_index;
      child.enemy_index = e.enumeration_index;
      try {
        TransitionPrediction p = bundle.PredictTransition(parent_state, f.action, e.action);
        child.state = p.state;
        child.reward = p.reward;
        child.terminal = IsTerminal(child.state, bundle.config());
        child.win_probabilities = bundle.StateValueVector(child.state);
        child.backed_up_value = bundle.ScalarValue(child.win_probabilities, Player::kFriendly);
      } catch (const std::exception& ex) {
        throw Error("model failure expanding node " + std::to_string(parent_id) + " with (" +
                    ToString(f.action) + ", " + ToString(e.action) + "): " + ex.what());
      }
      tree.nodes[parent_id].children.push_back(child.id);
      tree.nodes.push_back(std::move(child));
    }
  }
}

}  // namespace

int SearchTree::MaxDepth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

double BackupFromChildren(const SearchTree& tree, int node_id, int* best_child) {
  const TreeNode& node = tree.nodes.at(node_id);
  if (node.children.empty()) {
    if (best_child) *best_child = -1;
    return node.backed_up_value;
  }
  // friendly enumeration index -> (worst value, first child id)
  std::map<int, std::pair<double, int>> groups;
  for (int c : node.children) {
    const TreeNode& child = tree.nodes.at(c);
    auto [it, inserted] = groups.try_emplace(child.friendly_index, child.backed_up_value, c);
    if (!inserted) it->second.first = std::min(it->second.first, child.backed_up_value);
  }
  double best = 0;
  int best_id = -1;
  for (const auto& [index, group] : groups) {
    if (best_id < 0 || group.first > best) {
      best = group.first;
      best_id = group.second;
    }
  }
  if (best_child) *best_child = best_id;
  return best;
}

SearchTree BuildTree(const ModelBundle& bundle, const AbstractState& state,
                     const PruneWidths& widths) {
  if (IsTerminal(state, bundle.config())) throw Error("cannot plan from a terminal state");
  SearchTree tree;
  tree.widths = widths;
  TreeNode root;
  root.state = state;
  root.win_probabilities = bundle.StateValueVector(state);
  root.backed_up_value = bundle.ScalarValue(root.win_probabilities, Player::kFriendly);
  tree.nodes.push_back(root);

  Expand(bundle, tree, 0, widths.root_friendly, widths.root_enemy);
  const int first_level = static_cast<int>(tree.nodes.size());
  for (int id = 1; id < first_level; ++id) {
    if (tree.nodes[id].terminal) continue;
    Expand(bundle, tree, id, widths.inner_friendly, widths.inner_enemy);
  }

  // Bottom-up backup; children always have larger ids than their parent.
  for (int id = static_cast<int>(tree.nodes.size()) - 1; id >= 0; --id) {
    if (!tree.nodes[id].children.empty()) {
      tree.nodes[id].backed_up_value = BackupFromChildren(tree, id);
    }
  }
  int best_child = -1;
  BackupFromChildren(tree, 0, &best_child);
  tree.chosen_action = tree.nodes[best_child].parent_actions->friendly;
  return tree;
}

std::pair<PurchaseAction, SearchTree> SelectAction(const ModelBundle& bundle,
                                                   const AbstractState& state,
                                                   const PruneWidths& widths) {
  SearchTree tree = BuildTree(bundle, state, widths);
  PurchaseAction a = tree.chosen_action;
  return {a, std::move(tree)};
}

}  // namespace tugcheck
