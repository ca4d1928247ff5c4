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

#include "tugcheck/agents.h"

#include "tugcheck/common.h"
#include "tugcheck/symmetry.h"

namespace tugcheck {

namespace {

const PurchaseAction& PickUniform(const std::vector<PurchaseAction>& actions,
                                  std::mt19937_64& rng) {
  if (actions.empty()) throw Error("no legal actions: the state is terminal");
  std::uniform_int_distribution<size_t> pick(0, actions.size() - 1);
  return actions[pick(rng)];
}

}  // namespace

PurchaseAction RandomAgent::Act(const AbstractState& s, Player player, std::mt19937_64& rng) {
  return PickUniform(LegalActions(s, player, config_), rng);
}

QAgent::QAgent(QNetwork q, GameConfig config, double epsilon, std::string name)
    : q_(std::move(q)), config_(std::move(config)), epsilon_(epsilon), name_(std::move(name)) {}

PurchaseAction QAgent::Act(const AbstractState& s, Player player, std::mt19937_64& rng) {
  const AbstractState view = player == Player::kFriendly ? s : ReversePlayers(s);
  const auto actions = LegalActions(view, Player::kFriendly, config_);
  if (epsilon_ > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < epsilon_) {
    return PickUniform(actions, rng);
  }
  if (actions.empty()) throw Error("no legal actions: the state is terminal");
  const auto q = q_.Evaluate(view, actions);
  size_t best = 0;
  for (size_t i = 1; i < q.size(); ++i) {
    if (q[i][0] + q[i][1] > q[best][0] + q[best][1]) best = i;
  }
  return actions[best];
}

PlannerAgent::PlannerAgent(ModelBundle bundle, PruneWidths widths, TreeSink sink)
    : bundle_(std::move(bundle)), widths_(widths), sink_(std::move(sink)) {}

PurchaseAction PlannerAgent::Act(const AbstractState& s, Player player, std::mt19937_64&) {
  const AbstractState view = player == Player::kFriendly ? s : ReversePlayers(s);
  SearchTree tree = BuildTree(bundle_, view, widths_);
  if (sink_) sink_(tree, player);
  return tree.chosen_action;
}

}  // namespace tugcheck
