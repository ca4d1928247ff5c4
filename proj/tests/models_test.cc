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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.h"
#include "tugcheck/common.h"
#include "tugcheck/features.h"
#include "tugcheck/mlp.h"
#include "tugcheck/symmetry.h"

namespace tugcheck {
namespace {

using testing::RandomState;

PurchaseAction Buy(Lane lane, int m, int b, int i) {
  PurchaseAction a;
  a.lane = lane;
  a.purchases = {m, b, i};
  return a;
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tugcheck_models_" + name)).string();
}

TEST(FeaturesTest, RoundTripOnRandomStates) {
  GameConfig config;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    AbstractState s = RandomState(rng, 100, 40, 5000);
    float f[kStateFeatureSize];
    EncodeState(s, config, f);
    for (float v : f) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
    ASSERT_EQ(DecodeState(f, config), s) << DebugString(s);
  }
}

TEST(FeaturesTest, DecodeRoundsAndClamps) {
  GameConfig config;
  float f[kStateFeatureSize] = {};
  f[kHealthOffset] = 1.5f;
  f[kHealthOffset + 1] = -0.2f;
  f[kUnitsOffset] = 0.026f;  // 2.6 units
  AbstractState s = DecodeState(f, config);
  EXPECT_EQ(s.health[0][0], config.base_health);
  EXPECT_EQ(s.health[0][1], 0);
  EXPECT_EQ(s.units[0][0][0][0], 3);
}

TEST(FeaturesTest, ActionEncoding) {
  float f[kActionFeatureSize];
  EncodeAction(Buy(Lane::kBottom, 2, 0, 1), f);
  EXPECT_FLOAT_EQ(f[0], 0.0f);
  EXPECT_FLOAT_EQ(f[1], 1.0f);
  EXPECT_FLOAT_EQ(f[2], 2.0f / kPurchaseScale);
  EXPECT_FLOAT_EQ(f[4], 1.0f / kPurchaseScale);
  EncodeAction(EmptyAction(), f);
  for (float v : f) EXPECT_EQ(v, 0.0f);
}

TEST(MlpTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  Mlp net({4, 6, 5, 3}, rng);
  Matrix x = Matrix::Random(4, 2);
  Matrix target = Matrix::Random(3, 2);
  auto loss = [&](const Mlp& m) {
    Matrix y = m.Forward(x);
    return 0.5 * static_cast<double>((y - target).squaredNorm());
  };
  Mlp::Tape tape;
  Matrix y = net.Forward(x, &tape);
  Mlp::Gradients g = net.Backward(tape, y - target);
  const float h = 1e-2f;
  for (size_t l = 0; l < net.layers().size(); ++l) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        Mlp plus = net, minus = net;
        plus.layers()[l].weight(r, c) += h;
        minus.layers()[l].weight(r, c) -= h;
        const double numeric = (loss(plus) - loss(minus)) / (2 * h);
        EXPECT_NEAR(g.weight[l](r, c), numeric, 2e-2) << "layer " << l;
      }
      Mlp plus = net, minus = net;
      plus.layers()[l].bias(r) += h;
      minus.layers()[l].bias(r) -= h;
      EXPECT_NEAR(g.bias[l](r), (loss(plus) - loss(minus)) / (2 * h), 2e-2);
    }
  }
}

TEST(MlpTest, AdamReducesLoss) {
  std::mt19937_64 rng(5);
  Mlp net({3, 16, 1}, rng);
  Adam adam(net, 1e-2f);
  Matrix x = Matrix::Random(3, 32);
  Matrix target = x.colwise().sum();
  auto loss = [&] { return (net.Forward(x) - target).squaredNorm(); };
  const float before = loss();
  for (int i = 0; i < 300; ++i) {
    Mlp::Tape tape;
    Matrix y = net.Forward(x, &tape);
    adam.Step(net, net.Backward(tape, (y - target) / 32.0f));
  }
  EXPECT_LT(loss(), before * 0.1f);
}

TEST(MlpTest, WeightsReloadBitExact) {
  std::mt19937_64 rng(9);
  Mlp net({kQInputSize, 256, 128, 64, 4}, rng);
  std::stringstream buffer;
  SaveWeights(net, "qnet", buffer);
  std::string kind;
  Mlp loaded = LoadWeights(buffer, &kind);
  EXPECT_EQ(kind, "qnet");
  EXPECT_TRUE(loaded == net);
}

TEST(MlpTest, RejectsCorruptWeights) {
  std::string kind;
  std::stringstream bad_header("not-weights 1\n");
  EXPECT_THROW(LoadWeights(bad_header, &kind), FormatError);
  std::mt19937_64 rng(1);
  Mlp net({2, 3, 1}, rng);
  std::stringstream buffer;
  SaveWeights(net, "value", buffer);
  std::string text = buffer.str();
  text.resize(text.size() - 20);
  std::stringstream truncated(text);
  EXPECT_THROW(LoadWeights(truncated, &kind), FormatError);
}

TEST(NetworksTest, RandomQNetworkOutputsAreProbabilities) {
  GameConfig config;
  std::mt19937_64 rng(13);
  QNetwork q = QNetwork::Random(config, rng);
  for (int i = 0; i < 50; ++i) {
    AbstractState s = RandomState(rng);
    auto actions = LegalActions(s, Player::kFriendly, config);
    for (const QVector& v : q.Evaluate(s, actions)) {
      for (double c : v) {
        ASSERT_TRUE(std::isfinite(c));
        ASSERT_GE(c, 0.0);
        ASSERT_LE(c, 1.0);
      }
    }
  }
}

TEST(NetworksTest, UntrainedTransitionPredictsNoChange) {
  GameConfig config;
  std::mt19937_64 rng(17);
  TransitionNetwork t = TransitionNetwork::Random(config, rng);
  AbstractState s = RandomState(rng);
  auto p = t.Predict(s, {EmptyAction(), EmptyAction()});
  EXPECT_EQ(p.state, s);
}

TEST(NetworksTest, SaveLoadChecksKind) {
  GameConfig config;
  std::mt19937_64 rng(19);
  QNetwork q = QNetwork::Random(config, rng);
  const std::string path = TempPath("q.weights");
  q.Save(path);
  EXPECT_TRUE(QNetwork::Load(path, config).mlp() == q.mlp());
  EXPECT_THROW(TransitionNetwork::Load(path, config), FormatError);
  std::filesystem::remove(path);
}

// ---------------------------------------------------------------------------

TEST(ExactBundleTest, TransitionMatchesSimulator) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  std::mt19937_64 rng(23);
  AbstractState empty = InitialState(config);
  auto p = bundle.PredictTransition(empty, EmptyAction(), EmptyAction());
  EXPECT_EQ(p.state,
            SimulateWaveDeterministic(empty, EmptyAction(), EmptyAction(), config).state);
  for (int i = 0; i < 100; ++i) {
    AbstractState s = RandomState(rng);
    auto f = testing::RandomLegalAction(s, Player::kFriendly, config, rng);
    auto e = testing::RandomLegalAction(s, Player::kEnemy, config, rng);
    WaveResult r = SimulateWaveDeterministic(s, f, e, config);
    auto got = bundle.PredictTransition(s, f, e);
    ASSERT_EQ(got.state, r.state);
    RewardVector want{};
    if (r.outcome) want = r.outcome->reward;
    ASSERT_EQ(got.reward, want);
  }
}

TEST(ExactBundleTest, IllegalActionThrows) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  AbstractState s = InitialState(config);
  EXPECT_THROW(bundle.PredictTransition(s, Buy(Lane::kTop, 0, 0, 2), EmptyAction()),
               LegalityError);
  EXPECT_THROW(bundle.PredictTransition(s, EmptyAction(), Buy(Lane::kTop, 5, 0, 0)),
               LegalityError);
}

TEST(ExactBundleTest, HeuristicIsEquivariantAndBounded) {
  GameConfig config;
  HeuristicStateValue h(config);
  std::mt19937_64 rng(29);
  for (int i = 0; i < 2000; ++i) {
    AbstractState s = RandomState(rng);
    QVector v = h.Value(s);
    double sum = 0;
    for (double c : v) {
      ASSERT_GT(c, 0.0);
      sum += c;
    }
    ASSERT_LT(sum, 1.0);
    ASSERT_EQ(h.Value(FlipLanes(s)), FlipComponents(v));
    ASSERT_EQ(h.Value(ReversePlayers(s)), ReverseComponents(v));
  }
}

TEST(ExactBundleTest, TerminalValueIsRewardVector) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  AbstractState s = InitialState(config);
  s.Health(Player::kFriendly, Lane::kTop) = 0;
  EXPECT_EQ(bundle.StateValueVector(s), (QVector{0, 0, 1, 0}));
  EXPECT_EQ(bundle.StateValue(s, Player::kFriendly), 0.0);
  EXPECT_EQ(bundle.StateValue(s, Player::kEnemy), 1.0);
}

TEST(ExactBundleTest, RankingProperties) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    AbstractState s = RandomState(rng);
    for (Player p : {Player::kFriendly, Player::kEnemy}) {
      auto legal = LegalActions(s, p, config);
      auto ranked = bundle.RankActions(s, p, 20);
      ASSERT_EQ(ranked.size(), std::min<size_t>(20, legal.size()));
      for (size_t j = 0; j < ranked.size(); ++j) {
        ASSERT_EQ(legal[ranked[j].enumeration_index], ranked[j].action);
        ASSERT_DOUBLE_EQ(ranked[j].score,
                         bundle.ScalarValue(bundle.QValues(s, ranked[j].action, p), p));
        if (j > 0) {
          ASSERT_GE(ranked[j - 1].score, ranked[j].score);
          if (ranked[j - 1].score == ranked[j].score) {
            ASSERT_LT(ranked[j - 1].enumeration_index, ranked[j].enumeration_index);
          }
        }
      }
    }
  }
}

TEST(ExactBundleTest, EnemyRankingMirrorsFriendly) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  std::mt19937_64 rng(37);
  for (int i = 0; i < 30; ++i) {
    AbstractState s = RandomState(rng);
    auto enemy = bundle.RankActions(s, Player::kEnemy, 10);
    auto friendly = bundle.RankActions(ReversePlayers(s), Player::kFriendly, 10);
    ASSERT_EQ(enemy.size(), friendly.size());
    for (size_t j = 0; j < enemy.size(); ++j) {
      ASSERT_EQ(enemy[j].action, friendly[j].action);
      ASSERT_EQ(enemy[j].score, friendly[j].score);
    }
  }
}

TEST(ExactBundleTest, RankEdgeCases) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  AbstractState s = InitialState(config);
  s.currency = {0, 0};
  auto one = bundle.RankActions(s, Player::kFriendly, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].action.IsEmpty());
  s.currency = {100, 100};
  EXPECT_EQ(bundle.RankActions(s, Player::kFriendly, 500).size(),
            LegalActions(s, Player::kFriendly, config).size());
  EXPECT_THROW(bundle.RankActions(s, Player::kFriendly, 0), ConfigError);
}

TEST(ExactBundleTest, InvertedRankerReturnsBottomK) {
  GameConfig config;
  ModelBundle normal = MakeExactBundle(config);
  FlawSpec flaws;
  flaws.invert_ranker = true;
  ModelBundle inverted = WithFlaws(normal, flaws);
  std::mt19937_64 rng(41);
  AbstractState s = RandomState(rng);
  auto all = normal.RankActions(s, Player::kFriendly, 100000);
  auto bottom = inverted.RankActions(s, Player::kFriendly, 5);
  ASSERT_EQ(bottom.size(), 5u);
  for (const auto& r : bottom) {
    for (const auto& other : all) {
      if (other.score < r.score) {
        bool listed = false;
        for (const auto& b : bottom) listed |= b.enumeration_index == other.enumeration_index;
        ASSERT_TRUE(listed) << "a lower-scored action was left out";
      }
    }
  }
}

TEST(ExactBundleTest, DefinitionalValueIsMaxOverActions) {
  GameConfig config;
  ModelBundle bundle = MakeExactBundle(config);
  std::mt19937_64 rng(43);
  for (int i = 0; i < 30; ++i) {
    AbstractState s = RandomState(rng);
    for (Player p : {Player::kFriendly, Player::kEnemy}) {
      const double v = bundle.DefinitionalStateValue(s, p);
      for (const auto& a : LegalActions(s, p, config)) {
        ASSERT_GE(v, bundle.ScalarValue(bundle.QValues(s, a, p), p));
      }
    }
  }
  AbstractState poor = InitialState(config);
  poor.currency = {0, 0};
  EXPECT_EQ(bundle.DefinitionalStateValue(poor, Player::kFriendly),
            bundle.ScalarValue(bundle.QValues(poor, EmptyAction(), Player::kFriendly),
                               Player::kFriendly));
}

// Independent brute force: full simultaneous-move minimax (friendly picks
// first, enemy replies) over every legal action until the game ends.
double BruteForceWin(const AbstractState& s, const GameConfig& config) {
  if (auto o = TerminalOutcome(s, config)) return o->reward[0] + o->reward[1];
  double best = -1;
  for (const auto& f : LegalActions(s, Player::kFriendly, config)) {
    double worst = 2;
    for (const auto& e : LegalActions(s, Player::kEnemy, config)) {
      WaveResult r = SimulateWaveDeterministic(s, f, e, config);
      worst = std::min(worst, BruteForceWin(r.state, config));
    }
    best = std::max(best, worst);
  }
  return best;
}

TEST(ExactBundleTest, RolloutMatchesBruteForceOnEndgames) {
  GameConfig config = GameConfig::Shrunken();
  ModelBundle bundle = MakeExactBundle(config, 2);
  std::mt19937_64 rng(47);
  int decisive = 0;
  for (int i = 0; i < 12; ++i) {
    AbstractState s = RandomState(rng, 4, 2, 100, 60, 0);
    s.wave_index = config.max_waves - 2;
    const double want = BruteForceWin(s, config);
    ASSERT_EQ(bundle.DefinitionalStateValue(s, Player::kFriendly), want) << DebugString(s);
    decisive += want == 1.0;
  }
  EXPECT_GT(decisive, 0);
}

TEST(ExactBundleTest, OneWaveRolloutMatchesBruteForceAtFinalWave) {
  GameConfig config = GameConfig::Shrunken();
  ModelBundle bundle = MakeExactBundle(config, 1);
  std::mt19937_64 rng(53);
  for (int i = 0; i < 30; ++i) {
    AbstractState s = RandomState(rng, 6, 3, 200, 40, 0);
    s.wave_index = config.max_waves - 1;
    ASSERT_EQ(bundle.DefinitionalStateValue(s, Player::kFriendly), BruteForceWin(s, config));
  }
}

// ---------------------------------------------------------------------------

TEST(FlawsTest, KeyValueRoundTrip) {
  KeyValueConfig kv = KeyValueConfig::Parse(
      "seed = 7\n"
      "healthInflation = lane:top player:enemy amount:10 probability:0.3\n"
      "phantomUnits = unit:immortal count:2\n"
      "asymmetryNoise = scale:2\n"
      "winProbLeak = epsilon:0.05\n"
      "ranker = inverted\n");
  FlawSpec spec = FlawSpec::FromKeyValue(kv);
  ASSERT_TRUE(spec.health_inflation && spec.phantom_units && spec.asymmetry_noise &&
              spec.win_prob_leak);
  EXPECT_EQ(spec.health_inflation->amount, 10);
  EXPECT_EQ(spec.phantom_units->count, 2);
  EXPECT_TRUE(spec.invert_ranker);
  FlawSpec again = FlawSpec::FromKeyValue(spec.ToKeyValue());
  EXPECT_EQ(again.ToKeyValue().Serialize(), spec.ToKeyValue().Serialize());
  EXPECT_THROW(FlawSpec::FromKeyValue(KeyValueConfig::Parse("healthInflation = lane:top\n")),
               ConfigError);
  EXPECT_THROW(FlawSpec::FromKeyValue(KeyValueConfig::Parse("ranker = sideways\n")),
               ConfigError);
}

TEST(FlawsTest, HealthInflationRaisesHealthDeterministically) {
  GameConfig config;
  FlawSpec spec;
  spec.health_inflation = HealthInflation{Lane::kTop, Player::kEnemy, 10, 0.5};
  ModelBundle exact = MakeExactBundle(config);
  ModelBundle flawed = WithFlaws(exact, spec);
  std::mt19937_64 rng(59);
  int raised = 0;
  for (int i = 0; i < 200; ++i) {
    AbstractState s = RandomState(rng);
    auto f = testing::RandomLegalAction(s, Player::kFriendly, config, rng);
    auto e = testing::RandomLegalAction(s, Player::kEnemy, config, rng);
    auto a = flawed.PredictTransition(s, f, e);
    ASSERT_EQ(a.state, flawed.PredictTransition(s, f, e).state);
    const int diff = a.state.Health(Player::kEnemy, Lane::kTop) -
                     exact.PredictTransition(s, f, e).state.Health(Player::kEnemy, Lane::kTop);
    ASSERT_TRUE(diff == 0 || diff == 10);
    raised += diff == 10;
  }
  EXPECT_GT(raised, 60);
  EXPECT_LT(raised, 140);
}

TEST(FlawsTest, PhantomUnitsAndNoise) {
  GameConfig config;
  ModelBundle exact = MakeExactBundle(config);
  FlawSpec phantom;
  phantom.phantom_units = PhantomUnits{};
  AbstractState s = InitialState(config);
  auto p = WithFlaws(exact, phantom).PredictTransition(s, EmptyAction(), EmptyAction());
  EXPECT_EQ(p.state.Units(Player::kFriendly, Lane::kTop, UnitType::kImmortal, 1), 1);
  EXPECT_EQ(p.state.Buildings(Player::kFriendly, Lane::kTop, UnitType::kImmortal), 0);

  FlawSpec noise;
  noise.asymmetry_noise = AsymmetryNoise{2};
  ModelBundle noisy = WithFlaws(exact, noise);
  std::mt19937_64 rng(61);
  int broken = 0;
  for (int i = 0; i < 50; ++i) {
    AbstractState r = RandomState(rng);
    auto out = noisy.PredictTransition(r, EmptyAction(), EmptyAction()).state;
    auto flipped =
        noisy.PredictTransition(FlipLanes(r), EmptyAction(), EmptyAction()).state;
    broken += FlipLanes(out) != flipped;
  }
  EXPECT_GT(broken, 40);
}

TEST(FlawsTest, WinProbLeakAndClampDiagnostics) {
  GameConfig config;
  FlawSpec leak;
  leak.win_prob_leak = WinProbLeak{0.05};
  ModelBundle bundle = WithFlaws(MakeExactBundle(config), leak);
  AbstractState s = InitialState(config);
  s.Health(Player::kFriendly, Lane::kTop) = 0;
  QVector v = bundle.StateValueVector(s);
  EXPECT_EQ(v, (QVector{0.05, 0.05, 1.0, 0.05}));
  EXPECT_EQ(bundle.clamp_diagnostics(), 0);
  EXPECT_EQ(bundle.StateValue(s, Player::kEnemy), 1.0);
  EXPECT_EQ(bundle.clamp_diagnostics(), 1);
}

TEST(BundleTest, LoadBundleSpecs) {
  GameConfig config = GameConfig::Shrunken();
  EXPECT_NO_THROW(LoadBundle("exact", config));
  EXPECT_THROW(LoadBundle("bogus", config), ConfigError);

  const std::string flaw_path = TempPath("flaw.cfg");
  {
    std::ofstream out(flaw_path);
    out << "base = exact\nwinProbLeak = epsilon:0.1\n";
  }
  ModelBundle flawed = LoadBundle("flawed:" + flaw_path, config);
  ASSERT_TRUE(flawed.flaws().win_prob_leak);
  EXPECT_DOUBLE_EQ(flawed.flaws().win_prob_leak->epsilon, 0.1);

  std::mt19937_64 rng(67);
  const std::string q_path = TempPath("q.w");
  const std::string t_path = TempPath("t.w");
  QNetwork q = QNetwork::Random(config, rng);
  q.Save(q_path);
  TransitionNetwork::Random(config, rng).Save(t_path);
  ModelBundle learned = LoadBundle("learned:" + q_path + ":" + t_path, config);
  EXPECT_FALSE(learned.uses_direct_value());
  AbstractState s = InitialState(config);
  EXPECT_EQ(learned.QValues(s, EmptyAction(), Player::kFriendly),
            q.Evaluate(s, std::vector<PurchaseAction>{EmptyAction()})[0]);
  EXPECT_EQ(learned.StateValueVector(s),
            learned.DefinitionalStateValueVector(s, Player::kFriendly));
  std::filesystem::remove(flaw_path);
  std::filesystem::remove(q_path);
  std::filesystem::remove(t_path);
}

}  // namespace
}  // namespace tugcheck
