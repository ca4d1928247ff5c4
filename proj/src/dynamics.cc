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

#include "tugcheck/dynamics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "tugcheck/common.h"
#include "tugcheck/state_json.h"

namespace tugcheck {

using nlohmann::json;

std::vector<TransitionRecord> CollectDynamicsDataset(const AgentPool& pool, int num_episodes,
                                                     double random_fraction,
                                                     const GameConfig& config,
                                                     std::uint64_t seed) {
  if (num_episodes < 1) throw ConfigError("need at least one episode");
  if (random_fraction < 0 || random_fraction > 1) {
    throw ConfigError("random agent fraction must be in [0, 1]");
  }
  if (pool.size() == 0 && random_fraction < 1) throw ConfigError("the agent pool is empty");
  std::vector<TransitionRecord> out;
  for (int i = 0; i < num_episodes; ++i) {
    std::mt19937_64 rng(MixBits(seed ^ (0x51ed27ULL * (i + 1))));
    std::uniform_real_distribution<double> coin(0, 1);
    auto pick = [&]() -> std::unique_ptr<Agent> {
      if (coin(rng) < random_fraction) return std::make_unique<RandomAgent>(config);
      return pool.MakeAgent(std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng),
                            config);
    };
    auto friendly = pick();
    auto enemy = pick();
    GameResult g = PlayGame(config, *friendly, *enemy, MixBits(seed + i), i);
    out.insert(out.end(), g.transitions.begin(), g.transitions.end());
  }
  return out;
}

void SaveDataset(const std::vector<TransitionRecord>& records, const GameConfig& config,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset " + path);
  out << json{{"format", "tugcheck-dataset"},
              {"version", 1},
              {"configHash", HexDigest(config.Hash())},
              {"records", records.size()}}
             .dump()
      << '\n';
  for (const auto& r : records) {
    out << json{{"episode", r.episode}, {"seed", r.seed},       {"s", ToJson(r.s)},
                {"aF", ToJson(r.a_f)},  {"aE", ToJson(r.a_e)},  {"sNext", ToJson(r.s_next)},
                {"reward", r.reward}}
               .dump()
        << '\n';
  }
}

std::vector<TransitionRecord> LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open dataset " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty dataset file");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "tugcheck-dataset" ||
      header.value("version", 0) != 1) {
    throw FormatError(path + ": not a version 1 dataset");
  }
  std::vector<TransitionRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError(path + ":" + std::to_string(line_no) + ": bad JSON");
    try {
      TransitionRecord r;
      r.episode = j.at("episode").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.s = StateFromJson(j.at("s"));
      r.a_f = ActionFromJson(j.at("aF"));
      r.a_e = ActionFromJson(j.at("aE"));
      r.s_next = StateFromJson(j.at("sNext"));
      r.reward = Vector4FromJson(j.at("reward"));
      out.push_back(r);
    } catch (const std::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

DynamicsReport EvaluateDynamics(const TransitionNetwork& net,
                                const std::vector<TransitionRecord>& records,
                                const GameConfig& config) {
  DynamicsReport report;
  report.holdout_size = static_cast<int>(records.size());
  report.attribute_mae.assign(kStateFeatureSize, 0.0);
  if (records.empty()) return report;
  float pred[kStateFeatureSize], truth[kStateFeatureSize], before[kStateFeatureSize];
  double baseline = 0, reward = 0;
  for (const auto& r : records) {
    auto p = net.Predict(r.s, {r.a_f, r.a_e});
    EncodeState(p.state, config, pred);
    EncodeState(r.s_next, config, truth);
    EncodeState(r.s, config, before);
    for (int i = 0; i < kStateFeatureSize; ++i) {
      const double scale = FeatureScale(i, config);
      report.attribute_mae[i] += std::abs(pred[i] - truth[i]) * scale;
      if (i < kBuildingsOffset) baseline += std::abs(before[i] - truth[i]) * scale;
    }
    for (int i = 0; i < 4; ++i) reward += std::abs(p.reward[i] - r.reward[i]);
  }
  const double n = static_cast<double>(records.size());
  for (double& v : report.attribute_mae) v /= n;
  for (int i = kHealthOffset; i < kBuildingsOffset; ++i) {
    report.health_mae += report.attribute_mae[i];
  }
  report.health_mae /= kBuildingsOffset - kHealthOffset;
  report.baseline_health_mae = baseline / (n * (kBuildingsOffset - kHealthOffset));
  report.reward_mae = reward / (4 * n);
  return report;
}

TransitionNetwork TrainDynamics(const std::vector<TransitionRecord>& dataset,
                                const GameConfig& config, const DynamicsParams& params,
                                DynamicsReport* report) {
  if (dataset.empty()) throw ConfigError("the dynamics dataset is empty");
  if (params.batch_size < 1 || params.epochs < 0) throw ConfigError("bad training sizes");
  std::mt19937_64 rng(params.seed);
  TransitionNetwork net = TransitionNetwork::Random(config, rng);

  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  size_t holdout = 0;
  if (dataset.size() >= 2) {
    holdout = std::max<size_t>(1, static_cast<size_t>(dataset.size() * params.holdout_fraction));
    holdout = std::min(holdout, dataset.size() - 1);
  }
  std::vector<size_t> train(order.begin() + holdout, order.end());
  std::vector<TransitionRecord> held;
  for (size_t i = 0; i < holdout; ++i) held.push_back(dataset[order[i]]);

  const long n = static_cast<long>(train.size());
  Matrix inputs(kTransitionInputSize, n);
  Matrix next(kStateFeatureSize, n);
  Matrix rewards(4, n);
  for (long j = 0; j < n; ++j) {
    const auto& r = dataset[train[j]];
    TransitionNetwork::Inputs(r.s, {r.a_f, r.a_e}, config,
                              std::span<float>(inputs.col(j).data(), kTransitionInputSize));
    EncodeState(r.s_next, config, std::span<float>(next.col(j).data(), kStateFeatureSize));
    for (int i = 0; i < 4; ++i) rewards(i, j) = static_cast<float>(r.reward[i]);
  }

  Adam adam(net.mlp(), params.learning_rate);
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  double epoch_loss = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    epoch_loss = 0;
    for (long start = 0; start < n; start += params.batch_size) {
      const long b = std::min<long>(params.batch_size, n - start);
      Matrix x(kTransitionInputSize, b);
      for (long j = 0; j < b; ++j) x.col(j) = inputs.col(idx[start + j]);
      Mlp::Tape tape;
      Matrix raw = net.mlp().Forward(x, &tape);
      Matrix d(kTransitionOutputSize, b);
      double loss = 0;
      for (long j = 0; j < b; ++j) {
        const long k = idx[start + j];
        for (int i = 0; i < kStateFeatureSize; ++i) {
          const float t = std::tanh(raw(i, j));
          const float diff = x(i, j) + t - next(i, k);
          loss += diff * diff;
          d(i, j) = 2.0f * diff * (1.0f - t * t) / b;
        }
        for (int i = 0; i < 4; ++i) {
          const float p = Sigmoid(raw(kStateFeatureSize + i, j));
          const float y = rewards(i, k);
          const float pc = std::clamp(p, 1e-7f, 1.0f - 1e-7f);
          loss -= params.reward_weight * (y * std::log(pc) + (1 - y) * std::log(1 - pc));
          d(kStateFeatureSize + i, j) = static_cast<float>(params.reward_weight * (p - y) / b);
        }
      }
      if (!std::isfinite(loss) || !d.allFinite()) {
        throw DivergenceError("dynamics loss went non-finite in epoch " + std::to_string(epoch));
      }
      epoch_loss += loss;
      adam.Step(net.mlp(), net.mlp().Backward(tape, d));
    }
    epoch_loss /= std::max<long>(1, n);
  }
  if (!net.mlp().AllFinite()) throw DivergenceError("dynamics weights went non-finite");

  if (report) {
    *report = EvaluateDynamics(net, held.empty() ? std::vector<TransitionRecord>{dataset[0]} : held,
                               config);
    report->train_size = static_cast<int>(n);
    report->holdout_size = static_cast<int>(held.size());
    report->final_train_loss = epoch_loss;
  }
  return net;
}

}  // namespace tugcheck
