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

// The model suite behind the planner: a transition model, an action-value
// model used for ranking, and a state-value function. Backends are
// interchangeable: exact (simulator-backed), learned (MLPs), and any of
// those wrapped with injected flaws.

#ifndef TUGCHECK_MODELS_H_
#define TUGCHECK_MODELS_H_

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tugcheck/flaws.h"
#include "tugcheck/game.h"
#include "tugcheck/networks.h"

namespace tugcheck {

struct TransitionPrediction {
  AbstractState state;
  RewardVector reward{};
};

class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual TransitionPrediction Predict(const AbstractState& s, const ActionPair& a) const = 0;
  virtual std::string Describe() const = 0;
};

// Friendly-perspective action values. Enemy values are obtained by the
// bundle through ReversePlayers.
class ActionValueModel {
 public:
  virtual ~ActionValueModel() = default;
  virtual std::vector<QVector> Evaluate(const AbstractState& s,
                                        std::span<const PurchaseAction> actions) const = 0;
  virtual std::string Describe() const = 0;
};

// Direct state-value function (absolute component order).
class StateValueModel {
 public:
  virtual ~StateValueModel() = default;
  virtual QVector Value(const AbstractState& s) const = 0;
  virtual std::string Describe() const = 0;
};

// ---------------------------------------------------------------------------
// Exact backend

class ExactTransitionModel : public TransitionModel {
 public:
  explicit ExactTransitionModel(GameConfig config);
  TransitionPrediction Predict(const AbstractState& s, const ActionPair& a) const override;
  std::string Describe() const override { return "exact"; }

 private:
  GameConfig config_;
};

// Hand-written evaluation: a softmax over the four destroy outcomes plus a
// "no destruction" outcome, scored from base damage and lane army strength.
// Terminal states get their reward vector. Exactly equivariant under both
// symmetry transforms.
class HeuristicStateValue : public StateValueModel {
 public:
  explicit HeuristicStateValue(GameConfig config);
  QVector Value(const AbstractState& s) const override;
  std::string Describe() const override { return "exact"; }

 private:
  GameConfig config_;
};

// Exact action values by simulator rollout. With rollout_depth 0 the action
// is simulated for one wave against an idle opponent and the result is
// scored by the heuristic. With depth d >= 1 the value is a full minimax
// over both players' actions for d waves, heuristic at the horizon.
class ExactActionValueModel : public ActionValueModel {
 public:
  ExactActionValueModel(GameConfig config, int rollout_depth = 0);
  std::vector<QVector> Evaluate(const AbstractState& s,
                                std::span<const PurchaseAction> actions) const override;
  std::string Describe() const override;

 private:
  QVector ActionValue(const AbstractState& s, const PurchaseAction& a, int depth) const;
  QVector MaxValue(const AbstractState& s, int depth) const;

  GameConfig config_;
  HeuristicStateValue heuristic_;
  int rollout_depth_;
};

// ---------------------------------------------------------------------------
// Learned backend

class LearnedTransitionModel : public TransitionModel {
 public:
  explicit LearnedTransitionModel(TransitionNetwork net) : net_(std::move(net)) {}
  TransitionPrediction Predict(const AbstractState& s, const ActionPair& a) const override;
  std::string Describe() const override { return "learned"; }

 private:
  TransitionNetwork net_;
};

class LearnedActionValueModel : public ActionValueModel {
 public:
  explicit LearnedActionValueModel(QNetwork net) : net_(std::move(net)) {}
  std::vector<QVector> Evaluate(const AbstractState& s,
                                std::span<const PurchaseAction> actions) const override {
    return net_.Evaluate(s, actions);
  }
  std::string Describe() const override { return "learned"; }

 private:
  QNetwork net_;
};

class LearnedStateValueModel : public StateValueModel {
 public:
  explicit LearnedStateValueModel(ValueNetwork net) : net_(std::move(net)) {}
  QVector Value(const AbstractState& s) const override { return net_.Evaluate(s); }
  std::string Describe() const override { return "learned"; }

 private:
  ValueNetwork net_;
};

// ---------------------------------------------------------------------------

struct RankedAction {
  PurchaseAction action;
  int enumeration_index = 0;  // position in LegalActions
  double score = 0.0;         // the ranking player's scalar value
};

// A player's win probability: the sum of that player's two components.
// Reported values are clamped at 1.
double RawScalarValue(const QVector& q, Player p);

class ModelBundle {
 public:
  // `value` may be null, in which case the state value is the definitional
  // max over actions of the action-value model.
  ModelBundle(GameConfig config, std::shared_ptr<const TransitionModel> transition,
              std::shared_ptr<const ActionValueModel> action_values,
              std::shared_ptr<const StateValueModel> value, FlawSpec flaws = {});

  const GameConfig& config() const { return config_; }
  const FlawSpec& flaws() const { return flaws_; }

  // Throws LegalityError for an illegal action.
  TransitionPrediction PredictTransition(const AbstractState& s, const PurchaseAction& friendly,
                                         const PurchaseAction& enemy) const;

  QVector QValues(const AbstractState& s, const PurchaseAction& a, Player player) const;
  std::vector<QVector> QValuesMany(const AbstractState& s,
                                   std::span<const PurchaseAction> actions,
                                   Player player) const;
  double ScalarValue(const QVector& q, Player player) const;

  // Top-k legal actions for `player` by that player's scalar value, stable
  // on enumeration order. Fewer than k when fewer actions are legal.
  std::vector<RankedAction> RankActions(const AbstractState& s, Player player, int k) const;

  // Win-probability decomposition used to annotate search nodes.
  QVector StateValueVector(const AbstractState& s) const;
  double StateValue(const AbstractState& s, Player player) const;

  // max over legal actions of the player's scalar Q; the vector returned is
  // the Q vector of the best action (lowest enumeration index on ties).
  QVector DefinitionalStateValueVector(const AbstractState& s, Player player) const;
  double DefinitionalStateValue(const AbstractState& s, Player player) const;
  std::optional<RankedAction> BestAction(const AbstractState& s, Player player) const;

  bool uses_direct_value() const { return value_ != nullptr; }
  std::string Describe() const;
  // Number of times a raw per-player sum exceeded 1 and was clamped.
  long clamp_diagnostics() const { return clamp_count_->load(); }

 private:
  friend ModelBundle WithFlaws(const ModelBundle& base, FlawSpec flaws);

  GameConfig config_;
  std::shared_ptr<const TransitionModel> transition_;
  std::shared_ptr<const ActionValueModel> action_values_;
  std::shared_ptr<const StateValueModel> value_;
  FlawSpec flaws_;
  std::shared_ptr<std::atomic<long>> clamp_count_;
};

ModelBundle MakeExactBundle(const GameConfig& config, int rollout_depth = 0);
ModelBundle WithFlaws(const ModelBundle& base, FlawSpec flaws);
ModelBundle MakeLearnedBundle(const GameConfig& config, QNetwork q,
                              std::optional<TransitionNetwork> transition,
                              std::optional<ValueNetwork> value);

// Bundle from a spec string:
//   exact
//   flawed:<flaw file>              (the file's `base` key names the base bundle)
//   learned:<q weights>[:<transition weights>[:<value weights>]]
// Missing learned transition weights fall back to the exact transition.
ModelBundle LoadBundle(const std::string& spec, const GameConfig& config);

}  // namespace tugcheck

#endif  // TUGCHECK_MODELS_H_
