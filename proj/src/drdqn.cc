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

#include "tugcheck/drdqn.h"

#include <algorithm>
#include <cmath>

#include "tugcheck/common.h"
#include "tugcheck/match.h"
#include "tugcheck/symmetry.h"

namespace tugcheck {

namespace {

size_t BestByFriendlyValue(const std::vector<QVector>& q) {
  size_t best = 0;
  for (size_t i = 1; i < q.size(); ++i) {
    if (q[i][0] + q[i][1] > q[best][0] + q[best][1]) best = i;
  }
  return best;
}

PurchaseAction EpsilonGreedy(const QNetwork& q, const AbstractState& s, double epsilon,
                             const GameConfig& config, std::mt19937_64& rng) {
  const auto actions = LegalActions(s, Player::kFriendly, config);
  if (std::uniform_real_distribution<double>(0, 1)(rng) < epsilon) {
    return actions[std::uniform_int_distribution<size_t>(0, actions.size() - 1)(rng)];
  }
  return actions[BestByFriendlyValue(q.Evaluate(s, actions))];
}

double BinaryCrossEntropy(double p, double y) {
  constexpr double kEps = 1e-7;
  p = std::clamp(p, kEps, 1 - kEps);
  return -(y * std::log(p) + (1 - y) * std::log(1 - p));
}

}  // namespace

std::vector<QVector> TdTargets(const QNetwork& target, const std::vector<const Experience*>& batch,
                               double gamma, const GameConfig& config) {
  std::vector<QVector> out;
  out.reserve(batch.size());
  for (const Experience* e : batch) {
    QVector y = e->reward;
    if (!e->terminal) {
      const auto actions = LegalActions(e->s_next, Player::kFriendly, config);
      const auto q = target.Evaluate(e->s_next, actions);
      const QVector& next = q[BestByFriendlyValue(q)];
      for (int i = 0; i < 4; ++i) y[i] += gamma * next[i];
    }
    out.push_back(y);
  }
  return out;
}

double EvaluateAgainstPool(const QNetwork& q, const AgentPool& pool, const GameConfig& config,
                           int games, std::uint64_t seed) {
  if (games <= 0) return 0.0;
  QAgent learner(q, config);
  std::mt19937_64 rng(seed);
  int wins = 0;
  for (int g = 0; g < games; ++g) {
    const size_t opp = std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng);
    auto opponent = pool.MakeAgent(opp, config);
    wins += PlayGame(config, learner, *opponent, MixBits(seed + g), g).FriendlyWon();
  }
  return static_cast<double>(wins) / games;
}

DrdqnResult TrainDrdqn(const AgentPool& pool, const GameConfig& config, int budget_episodes,
                       const DrdqnParams& params, std::ostream* progress) {
  if (pool.size() == 0) throw ConfigError("the opponent pool is empty");
  if (params.batch_size < 1 || params.learn_every < 1 || params.replay_capacity < 1 ||
      params.target_sync_updates < 1 || params.eval_every < 1) {
    throw ConfigError("training sizes and intervals must be positive");
  }
  std::mt19937_64 rng(params.seed);
  DrdqnResult result{QNetwork::Random(config, rng)};
  if (budget_episodes <= 0) return result;

  QNetwork& online = result.q;
  QNetwork target = online;
  Adam adam(online.mlp(), params.learning_rate);
  std::vector<std::unique_ptr<Agent>> opponents;
  for (size_t i = 0; i < pool.size(); ++i) opponents.push_back(pool.MakeAgent(i, config));

  std::vector<Experience> replay;
  size_t replay_next = 0;
  auto remember = [&](Experience e) {
    if (static_cast<int>(replay.size()) < params.replay_capacity) {
      replay.push_back(std::move(e));
    } else {
      replay[replay_next] = std::move(e);
      replay_next = (replay_next + 1) % replay.size();
    }
  };

  std::array<double, 4> loss_sum{};
  long loss_count = 0;
  auto update = [&] {
    const int n = params.batch_size;
    std::vector<const Experience*> batch;
    std::uniform_int_distribution<size_t> pick(0, replay.size() - 1);
    for (int i = 0; i < n; ++i) batch.push_back(&replay[pick(rng)]);
    const std::vector<QVector> y = TdTargets(target, batch, params.gamma, config);

    Matrix x(kQInputSize, n);
    for (int j = 0; j < n; ++j) {
      float* col = x.col(j).data();
      EncodeState(batch[j]->s, config, std::span<float>(col, kStateFeatureSize));
      EncodeAction(batch[j]->a, std::span<float>(col + kStateFeatureSize, kActionFeatureSize));
    }
    Mlp::Tape tape;
    Matrix raw = online.mlp().Forward(x, &tape);
    Matrix d(4, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < 4; ++i) {
        const double p = Sigmoid(raw(i, j));
        loss_sum[i] += BinaryCrossEntropy(p, y[j][i]) / n;
        d(i, j) = static_cast<float>((p - y[j][i]) / n);
      }
    }
    ++loss_count;
    if (!d.allFinite()) {
      throw DivergenceError("non-finite gradient at update " + std::to_string(result.updates));
    }
    adam.Step(online.mlp(), online.mlp().Backward(tape, d));
    if (!online.mlp().AllFinite()) {
      throw DivergenceError("non-finite weights after update " + std::to_string(result.updates));
    }
    ++result.updates;
    if (result.updates % params.target_sync_updates == 0) target = online;
  };

  if (progress) *progress << "episode,updates,epsilon,loss_0,loss_1,loss_2,loss_3,win_rate\n";
  const double decay_episodes = std::max(1.0, params.epsilon_decay_fraction * budget_episodes);
  long steps = 0;
  for (int ep = 0; ep < budget_episodes; ++ep) {
    const double frac = std::min(1.0, ep / decay_episodes);
    const double epsilon =
        params.epsilon_start + (params.epsilon_end - params.epsilon_start) * frac;
    const size_t opp = std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng);
    const std::uint64_t game_seed = MixBits(params.seed * 0x100000001b3ULL + ep + 1);
    std::mt19937_64 agent_rng(game_seed);

    AbstractState s = InitialState(config);
    while (true) {
      const PurchaseAction a_f = EpsilonGreedy(online, s, epsilon, config, rng);
      const PurchaseAction a_e = opponents[opp]->Act(s, Player::kEnemy, agent_rng);
      std::mt19937_64 wave_rng(WaveSeed(game_seed, s.wave_index));
      WaveResult w = SimulateWave(s, a_f, a_e, config, wave_rng);
      Experience e{s, a_f, {}, w.state, w.outcome.has_value()};
      if (w.outcome) e.reward = w.outcome->reward;
      if (params.flip_augmentation) {
        remember({FlipLanes(e.s), FlipLanes(e.a), FlipComponents(e.reward), FlipLanes(e.s_next),
                  e.terminal});
      }
      remember(std::move(e));
      ++steps;
      if (static_cast<int>(replay.size()) >= params.warmup_steps &&
          steps % params.learn_every == 0) {
        update();
      }
      if (w.outcome) break;
      s = w.state;
    }
    result.episodes = ep + 1;

    if ((ep + 1) % params.eval_every == 0 || ep + 1 == budget_episodes) {
      result.last_win_rate =
          EvaluateAgainstPool(online, pool, config, params.eval_games, MixBits(params.seed + ep));
      if (progress) {
        *progress << ep + 1 << ',' << result.updates << ',' << epsilon;
        for (double l : loss_sum) *progress << ',' << (loss_count ? l / loss_count : 0.0);
        *progress << ',' << result.last_win_rate << '\n';
      }
      loss_sum = {};
      loss_count = 0;
      if (result.last_win_rate >= params.stop_win_rate) {
        result.reached_stop_win_rate = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace tugcheck
