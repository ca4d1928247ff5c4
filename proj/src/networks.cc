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

#include "tugcheck/networks.h"

#include <cmath>

#include "tugcheck/common.h"

namespace tugcheck {

float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

namespace {

std::vector<int> Sizes(int in, int out) {
  std::vector<int> s = {in};
  s.insert(s.end(), kHiddenWidths.begin(), kHiddenWidths.end());
  s.push_back(out);
  return s;
}

void CheckShape(const Mlp& net, int in, int out, const std::string& what) {
  if (net.layers().empty() || net.input_size() != in || net.output_size() != out) {
    throw FormatError(what + ": expected a " + std::to_string(in) + " -> " +
                      std::to_string(out) + " network");
  }
}

Mlp LoadKind(const std::string& path, const std::string& want) {
  std::string kind;
  Mlp net = LoadWeightsFile(path, &kind);
  if (kind != want) {
    throw FormatError("weights file '" + path + "' holds a " + kind + ", expected " + want);
  }
  return net;
}

}  // namespace

// ---------------------------------------------------------------------------

QNetwork::QNetwork(Mlp net, GameConfig config)
    : net_(std::move(net)), config_(std::move(config)) {
  CheckShape(net_, kQInputSize, 4, "q network");
}

QNetwork QNetwork::Random(const GameConfig& config, std::mt19937_64& rng) {
  return QNetwork(Mlp(Sizes(kQInputSize, 4), rng), config);
}

Matrix QNetwork::Inputs(const AbstractState& s,
                        std::span<const PurchaseAction> actions) const {
  Matrix x(kQInputSize, static_cast<long>(actions.size()));
  float state_features[kStateFeatureSize];
  EncodeState(s, config_, state_features);
  for (size_t j = 0; j < actions.size(); ++j) {
    float* col = x.col(static_cast<long>(j)).data();
    std::copy(state_features, state_features + kStateFeatureSize, col);
    EncodeAction(actions[j], std::span<float>(col + kStateFeatureSize, kActionFeatureSize));
  }
  return x;
}

std::vector<QVector> QNetwork::Evaluate(const AbstractState& s,
                                        std::span<const PurchaseAction> actions) const {
  std::vector<QVector> out(actions.size());
  if (actions.empty()) return out;
  Matrix raw = net_.Forward(Inputs(s, actions));
  for (size_t j = 0; j < actions.size(); ++j) {
    for (int i = 0; i < 4; ++i) out[j][i] = Sigmoid(raw(i, static_cast<long>(j)));
  }
  return out;
}

void QNetwork::Save(const std::string& path) const { SaveWeightsFile(net_, "qnet", path); }

QNetwork QNetwork::Load(const std::string& path, const GameConfig& config) {
  return QNetwork(LoadKind(path, "qnet"), config);
}

// ---------------------------------------------------------------------------

TransitionNetwork::TransitionNetwork(Mlp net, GameConfig config)
    : net_(std::move(net)), config_(std::move(config)) {
  CheckShape(net_, kTransitionInputSize, kTransitionOutputSize, "transition network");
}

TransitionNetwork TransitionNetwork::Random(const GameConfig& config, std::mt19937_64& rng) {
  Mlp net(Sizes(kTransitionInputSize, kTransitionOutputSize), rng);
  // Start at "nothing changes" for the state head.
  auto& last = net.layers().back();
  last.weight.topRows(kStateFeatureSize).setZero();
  return TransitionNetwork(std::move(net), config);
}

void TransitionNetwork::Inputs(const AbstractState& s, const ActionPair& a,
                               const GameConfig& config, std::span<float> out) {
  EncodeState(s, config, out.subspan(0, kStateFeatureSize));
  EncodeAction(a.friendly, out.subspan(kStateFeatureSize, kActionFeatureSize));
  EncodeAction(a.enemy, out.subspan(kStateFeatureSize + kActionFeatureSize, kActionFeatureSize));
}

void TransitionNetwork::Heads(std::span<const float> input, std::span<const float> raw,
                              std::span<float> next_features, RewardVector* reward) const {
  for (int i = 0; i < kStateFeatureSize; ++i) {
    next_features[i] = input[i] + std::tanh(raw[i]);
  }
  if (reward) {
    for (int i = 0; i < 4; ++i) (*reward)[i] = Sigmoid(raw[kStateFeatureSize + i]);
  }
}

TransitionNetwork::Prediction TransitionNetwork::Predict(const AbstractState& s,
                                                         const ActionPair& a) const {
  Matrix x(kTransitionInputSize, 1);
  Inputs(s, a, config_, std::span<float>(x.data(), kTransitionInputSize));
  Matrix raw = net_.Forward(x);
  float next[kStateFeatureSize];
  Prediction p;
  Heads(std::span<const float>(x.data(), kTransitionInputSize),
        std::span<const float>(raw.data(), kTransitionOutputSize), next, &p.reward);
  p.state = DecodeState(next, config_);
  return p;
}

void TransitionNetwork::Save(const std::string& path) const {
  SaveWeightsFile(net_, "transition", path);
}

TransitionNetwork TransitionNetwork::Load(const std::string& path, const GameConfig& config) {
  return TransitionNetwork(LoadKind(path, "transition"), config);
}

// ---------------------------------------------------------------------------

ValueNetwork::ValueNetwork(Mlp net, GameConfig config)
    : net_(std::move(net)), config_(std::move(config)) {
  CheckShape(net_, kStateFeatureSize, 4, "value network");
}

ValueNetwork ValueNetwork::Random(const GameConfig& config, std::mt19937_64& rng) {
  return ValueNetwork(Mlp(Sizes(kStateFeatureSize, 4), rng), config);
}

QVector ValueNetwork::Evaluate(const AbstractState& s) const {
  Matrix x(kStateFeatureSize, 1);
  EncodeState(s, config_, std::span<float>(x.data(), kStateFeatureSize));
  Matrix raw = net_.Forward(x);
  QVector out;
  for (int i = 0; i < 4; ++i) out[i] = Sigmoid(raw(i, 0));
  return out;
}

void ValueNetwork::Save(const std::string& path) const { SaveWeightsFile(net_, "value", path); }

ValueNetwork ValueNetwork::Load(const std::string& path, const GameConfig& config) {
  return ValueNetwork(LoadKind(path, "value"), config);
}

}  // namespace tugcheck
