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

// Depth-2 pruned minimax over joint actions. Each tree is kept as an
// auditable artifact: every node carries its predicted state and the value
// model's win-probability vector.

#ifndef TUGCHECK_PLANNER_H_
#define TUGCHECK_PLANNER_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tugcheck/game.h"
#include "tugcheck/models.h"

namespace tugcheck {

struct PruneWidths {
  int root_friendly = 20;
  int root_enemy = 10;
  int inner_friendly = 5;
  int inner_enemy = 3;

  bool operator==(const PruneWidths&) const = default;
};

struct TreeNode {
  int id = 0;
  int depth = 0;
  int parent = -1;
  AbstractState state;
  QVector win_probabilities{};
  // Absent on the root.
  std::optional<ActionPair> parent_actions;
  // Enumeration indices of the parent actions in LegalActions of the parent
  // state; -1 on the root.
  int friendly_index = -1;
  int enemy_index = -1;
  RewardVector reward{};  // predicted reward of the transition into this node
  bool terminal = false;
  std::vector<int> children;
  double backed_up_value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

struct SearchTree {
  std::string episode_id;
  int decision_index = 0;
  int root = 0;
  std::vector<TreeNode> nodes;  // indexed by node id
  PurchaseAction chosen_action;
  PruneWidths widths;

  const TreeNode& node(int id) const { return nodes.at(id); }
  int MaxDepth() const;

  bool operator==(const SearchTree&) const = default;
};

// Throws Error for a terminal state and for model failures (the message
// names the node and the action pair).
SearchTree BuildTree(const ModelBundle& bundle, const AbstractState& state,
                     const PruneWidths& widths = {});

std::pair<PurchaseAction, SearchTree> SelectAction(const ModelBundle& bundle,
                                                   const AbstractState& state,
                                                   const PruneWidths& widths = {});

// max over friendly actions of min over enemy actions of the children's
// stored values; ties go to the lowest friendly enumeration index. Returns
// the value and, through `best_child`, a child realizing the chosen friendly
// action (first in id order). Leaves return their own stored value.
double BackupFromChildren(const SearchTree& tree, int node_id, int* best_child = nullptr);

}  // namespace tugcheck

#endif  // TUGCHECK_PLANNER_H_
