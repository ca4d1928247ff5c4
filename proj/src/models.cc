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

#include "tugcheck/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tugcheck/common.h"
#include "tugcheck/kv_config.h"
#include "tugcheck/symmetry.h"

namespace tugcheck {

namespace {

// Cell progress toward the opponent's base, 0 at home.
int Progress(int p, int cell) { return p == 0 ? cell : kNumGrids - 1 - cell; }

// Lane army strength of player p against player q. Computed identically for
// both players so the evaluation commutes with the symmetry transforms.
double ArmyStrength(const AbstractState& s, int p, int l, const GameConfig& config) {
  const int q = 1 - p;
  double opp_total = 0;
  PerUnit<double> opp{};
  for (int v = 0; v < kNumUnitTypes; ++v) {
    for (int c = 0; c < kNumGrids; ++c) opp[v] += s.units[q][l][v][c];
    opp[v] += s.buildings[q][l][v];
    opp_total += opp[v];
  }
  double total = 0;
  for (int u = 0; u < kNumUnitTypes; ++u) {
    long weight = 3L * s.buildings[p][l][u];
    for (int c = 0; c < kNumGrids; ++c) {
      weight += static_cast<long>(s.units[p][l][u][c]) * (2 + Progress(p, c));
    }
    if (weight == 0) continue;
    double counter = 0;
    for (int v = 0; v < kNumUnitTypes; ++v) {
      counter += static_cast<double>(config.damage[u][v]) / config.unit_hp[v] * opp[v];
    }
    counter /= 1.0 + opp_total;
    total += static_cast<double>(config.unit_cost[u]) * weight * (1.0 + counter);
  }
  return total;
}

AbstractState AfterPurchase(const AbstractState& s, const PurchaseAction& a,
                            const GameConfig& config) {
  AbstractState out = s;
  for (int u = 0; u < kNumUnitTypes; ++u) {
    out.buildings[0][Idx(a.lane)][u] += a.purchases[u];
  }
  out.currency[0] -= PurchaseCost(a, config);
  return out;
}

int FirstBest(const std::vector<double>& scores) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace

double RawScalarValue(const QVector& q, Player p) {
  return p == Player::kFriendly ? q[0] + q[1] : q[2] + q[3];
}

// ---------------------------------------------------------------------------

ExactTransitionModel::ExactTransitionModel(GameConfig config)
    : config_(config.Deterministic()) {}

TransitionPrediction ExactTransitionModel::Predict(const AbstractState& s,
                                                   const ActionPair& a) const {
  WaveResult r = SimulateWaveDeterministic(s, a.friendly, a.enemy, config_);
  TransitionPrediction out{r.state, {}};
  if (r.outcome) out.reward = r.outcome->reward;
  return out;
}

HeuristicStateValue::HeuristicStateValue(GameConfig config) : config_(std::move(config)) {}

QVector HeuristicStateValue::Value(const AbstractState& s) const {
  if (auto outcome = TerminalOutcome(s, config_)) return outcome->reward;
  // Mass for "player p destroys the opponent's base in lane l".
  double mass[kNumPlayers][kNumLanes];
  for (int l = 0; l < kNumLanes; ++l) {
    const double a0 = ArmyStrength(s, 0, l, config_);
    const double a1 = ArmyStrength(s, 1, l, config_);
    const double denom = a0 + a1 + 400.0;
    for (int p = 0; p < kNumPlayers; ++p) {
      const double mine = p == 0 ? a0 : a1;
      const double theirs = p == 0 ? a1 : a0;
      const double damage =
          1.0 - static_cast<double>(s.health[1 - p][l]) / config_.base_health;
      mass[p][l] = std::exp(4.0 * damage + 2.0 * (mine - theirs) / denom);
    }
  }
  const double timeout =
      std::exp(1.0 + 3.0 * static_cast<double>(s.wave_index) / config_.max_waves);
  // Pairwise sums keep the total bitwise invariant under both transforms.
  const double total =
      ((mass[0][0] + mass[0][1]) + (mass[1][0] + mass[1][1])) + timeout;
  return {mass[0][0] / total, mass[0][1] / total, mass[1][0] / total, mass[1][1] / total};
}

ExactActionValueModel::ExactActionValueModel(GameConfig config, int rollout_depth)
    : config_(config.Deterministic()), heuristic_(config_), rollout_depth_(rollout_depth) {
  if (rollout_depth < 0) throw ConfigError("rollout depth must be non-negative");
}

std::string ExactActionValueModel::Describe() const {
  return rollout_depth_ == 0 ? "exact" : "exact(rollout=" + std::to_string(rollout_depth_) + ")";
}

std::vector<QVector> ExactActionValueModel::Evaluate(
    const AbstractState& s, std::span<const PurchaseAction> actions) const {
  std::vector<QVector> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(ActionValue(s, a, rollout_depth_));
  return out;
}

QVector ExactActionValueModel::ActionValue(const AbstractState& s, const PurchaseAction& a,
                                           int depth) const {
  if (auto outcome = TerminalOutcome(s, config_)) return outcome->reward;
  if (depth == 0) return heuristic_.Value(AfterPurchase(s, a, config_));
  // Enemy replies minimize the friendly scalar value.
  QVector worst{};
  double worst_score = 0;
  bool first = true;
  for (const auto& e : LegalActions(s, Player::kEnemy, config_)) {
    WaveResult r = SimulateWaveDeterministic(s, a, e, config_);
    QVector v = MaxValue(r.state, depth - 1);
    const double score = RawScalarValue(v, Player::kFriendly);
    if (first || score < worst_score) {
      worst = v;
      worst_score = score;
      first = false;
    }
  }
  return worst;
}

QVector ExactActionValueModel::MaxValue(const AbstractState& s, int depth) const {
  if (auto outcome = TerminalOutcome(s, config_)) return outcome->reward;
  if (depth == 0) return heuristic_.Value(s);
  QVector best{};
  double best_score = 0;
  bool first = true;
  for (const auto& a : LegalActions(s, Player::kFriendly, config_)) {
    QVector v = ActionValue(s, a, depth);
    const double score = RawScalarValue(v, Player::kFriendly);
    if (first || score > best_score) {
      best = v;
      best_score = score;
      first = false;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

TransitionPrediction LearnedTransitionModel::Predict(const AbstractState& s,
                                                     const ActionPair& a) const {
  auto p = net_.Predict(s, a);
  return {p.state, p.reward};
}

// ---------------------------------------------------------------------------

ModelBundle::ModelBundle(GameConfig config, std::shared_ptr<const TransitionModel> transition,
                         std::shared_ptr<const ActionValueModel> action_values,
                         std::shared_ptr<const StateValueModel> value, FlawSpec flaws)
    : config_(std::move(config)),
      transition_(std::move(transition)),
      action_values_(std::move(action_values)),
      value_(std::move(value)),
      flaws_(std::move(flaws)),
      clamp_count_(std::make_shared<std::atomic<long>>(0)) {
  if (!transition_ || !action_values_) {
    throw ConfigError("model bundle needs a transition model and an action-value model");
  }
}

TransitionPrediction ModelBundle::PredictTransition(const AbstractState& s,
                                                    const PurchaseAction& friendly,
                                                    const PurchaseAction& enemy) const {
  for (Player p : {Player::kFriendly, Player::kEnemy}) {
    const PurchaseAction& a = p == Player::kFriendly ? friendly : enemy;
    if (!IsLegal(s, p, a, config_)) {
      throw LegalityError(std::string("illegal ") + PlayerName(p) + " action " + ToString(a));
    }
  }
  const ActionPair pair{friendly, enemy};
  TransitionPrediction out = transition_->Predict(s, pair);
  ApplyTransitionFlaws(flaws_, s, pair, &out.state);
  return out;
}

std::vector<QVector> ModelBundle::QValuesMany(const AbstractState& s,
                                              std::span<const PurchaseAction> actions,
                                              Player player) const {
  if (player == Player::kFriendly) return action_values_->Evaluate(s, actions);
  std::vector<QVector> out = action_values_->Evaluate(ReversePlayers(s), actions);
  for (auto& q : out) q = ReverseComponents(q);
  return out;
}

QVector ModelBundle::QValues(const AbstractState& s, const PurchaseAction& a,
                             Player player) const {
  return QValuesMany(s, std::span<const PurchaseAction>(&a, 1), player).front();
}

double ModelBundle::ScalarValue(const QVector& q, Player player) const {
  const double raw = RawScalarValue(q, player);
  if (raw > 1.0) {
    clamp_count_->fetch_add(1);
    return 1.0;
  }
  return raw;
}

std::vector<RankedAction> ModelBundle::RankActions(const AbstractState& s, Player player,
                                                   int k) const {
  if (k < 1) throw ConfigError("rank width must be at least 1");
  const std::vector<PurchaseAction> legal = LegalActions(s, player, config_);
  const std::vector<QVector> q = QValuesMany(s, legal, player);
  std::vector<double> score(legal.size());
  for (size_t i = 0; i < legal.size(); ++i) score[i] = ScalarValue(q[i], player);
  std::vector<int> order(legal.size());
  std::iota(order.begin(), order.end(), 0);
  if (flaws_.invert_ranker) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[a] < score[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
  }
  order.resize(std::min<size_t>(order.size(), static_cast<size_t>(k)));
  std::vector<RankedAction> out;
  out.reserve(order.size());
  for (int i : order) out.push_back({legal[i], i, score[i]});
  return out;
}

QVector ModelBundle::DefinitionalStateValueVector(const AbstractState& s, Player player) const {
  std::vector<PurchaseAction> legal = LegalActions(s, player, config_);
  // Terminal states have no legal actions; the idle action stands in.
  if (legal.empty()) legal.push_back(EmptyAction());
  const std::vector<QVector> q = QValuesMany(s, legal, player);
  std::vector<double> score(q.size());
  for (size_t i = 0; i < q.size(); ++i) score[i] = ScalarValue(q[i], player);
  return q[FirstBest(score)];
}

double ModelBundle::DefinitionalStateValue(const AbstractState& s, Player player) const {
  return ScalarValue(DefinitionalStateValueVector(s, player), player);
}

std::optional<RankedAction> ModelBundle::BestAction(const AbstractState& s,
                                                    Player player) const {
  auto ranked = RankActions(s, player, 1);
  if (ranked.empty()) return std::nullopt;
  return ranked.front();
}

QVector ModelBundle::StateValueVector(const AbstractState& s) const {
  QVector v = value_ ? value_->Value(s) : DefinitionalStateValueVector(s, Player::kFriendly);
  ApplyValueFlaws(flaws_, &v);
  return v;
}

double ModelBundle::StateValue(const AbstractState& s, Player player) const {
  return ScalarValue(StateValueVector(s), player);
}

std::string ModelBundle::Describe() const {
  std::string out = "transition=" + transition_->Describe() +
                    " ranker=" + action_values_->Describe() +
                    " value=" + (value_ ? value_->Describe() : "definitional");
  if (!flaws_.Empty()) out += " flaws=" + flaws_.Describe();
  return out;
}

// ---------------------------------------------------------------------------

ModelBundle MakeExactBundle(const GameConfig& config, int rollout_depth) {
  GameConfig det = config.Deterministic();
  return ModelBundle(det, std::make_shared<ExactTransitionModel>(det),
                     std::make_shared<ExactActionValueModel>(det, rollout_depth),
                     std::make_shared<HeuristicStateValue>(det));
}

ModelBundle WithFlaws(const ModelBundle& base, FlawSpec flaws) {
  ModelBundle out = base;
  out.flaws_ = std::move(flaws);
  out.clamp_count_ = std::make_shared<std::atomic<long>>(0);
  return out;
}

ModelBundle MakeLearnedBundle(const GameConfig& config, QNetwork q,
                              std::optional<TransitionNetwork> transition,
                              std::optional<ValueNetwork> value) {
  GameConfig det = config.Deterministic();
  std::shared_ptr<const TransitionModel> t;
  if (transition) {
    t = std::make_shared<LearnedTransitionModel>(std::move(*transition));
  } else {
    t = std::make_shared<ExactTransitionModel>(det);
  }
  std::shared_ptr<const StateValueModel> v;
  if (value) v = std::make_shared<LearnedStateValueModel>(std::move(*value));
  return ModelBundle(det, std::move(t), std::make_shared<LearnedActionValueModel>(std::move(q)),
                     std::move(v));
}

namespace {

std::vector<std::string> SplitColons(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(':', start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ModelBundle LoadBundle(const std::string& spec, const GameConfig& config) {
  if (spec == "exact") return MakeExactBundle(config);
  const auto parts = SplitColons(spec);
  if (parts[0] == "flawed" && parts.size() == 2) {
    KeyValueConfig kv = KeyValueConfig::Load(parts[1]);
    const std::string base = kv.GetString("base", "exact");
    if (base.rfind("flawed", 0) == 0) throw ConfigError("flaw file base cannot itself be flawed");
    return WithFlaws(LoadBundle(base, config), FlawSpec::FromKeyValue(kv));
  }
  if (parts[0] == "learned" && parts.size() >= 2 && parts.size() <= 4) {
    QNetwork q = QNetwork::Load(parts[1], config);
    std::optional<TransitionNetwork> t;
    std::optional<ValueNetwork> v;
    if (parts.size() >= 3 && !parts[2].empty()) t = TransitionNetwork::Load(parts[2], config);
    if (parts.size() == 4 && !parts[3].empty()) v = ValueNetwork::Load(parts[3], config);
    return MakeLearnedBundle(config, std::move(q), std::move(t), std::move(v));
  }
  throw ConfigError("unknown bundle spec '" + spec +
                    "' (expected exact, flawed:<file>, or learned:<q>[:<dyn>[:<value>]])");
}

}  // namespace tugcheck
