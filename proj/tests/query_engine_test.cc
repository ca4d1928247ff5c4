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


#include "tugcheck/query_engine.h"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "oracle/query_oracle.h"
#include "oracle/rule_gen.h"
#include "oracle/reference_rules.h"

namespace tugcheck {
namespace {

using oracle::ParseReferenceRule;

enum ReferenceIndex { kImmortalsWithoutBuildings, kLostButHopeful, kEnemyTopHealthRises, kUndefendedBottomDamage, kReverseMarineMismatch, kFlipMarineMismatch };

FlawSpec Phantom() {
  FlawSpec f;
  f.phantom_units = PhantomUnits{UnitType::kImmortal, 1, Lane::kTop, Player::kFriendly};
  return f;
}

FlawSpec Inflation() {
  FlawSpec f;
  f.health_inflation = HealthInflation{Lane::kTop, Player::kEnemy, 10, 0.3};
  f.seed = 3;
  return f;
}

FlawSpec Noise() {
  FlawSpec f;
  f.asymmetry_noise = AsymmetryNoise{2};
  f.seed = 5;
  return f;
}

// Two recorded shrunken-game episodes per store, counterfactuals for both
// transforms materialized.
TreeStore BuildStore(const FlawSpec& flaws, std::uint64_t seed) {
  const GameConfig config = GameConfig::Shrunken();
  const ModelBundle bundle = WithFlaws(MakeExactBundle(config), flaws);
  RandomAgent random(config);
  TreeStore store;
  for (std::uint64_t i = 0; i < 2; ++i) {
    auto id = store.Ingest(RecordEpisode(config, bundle, "test", random, seed + i,
                                         i % 2 ? Player::kEnemy : Player::kFriendly))
                  .episode_id;
    store.MaterializeCounterfactuals(id, bundle, Transform::kFlipLanes);
    store.MaterializeCounterfactuals(id, bundle, Transform::kReversePlayers);
  }
  return store;
}

class QueryEngineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    exact_ = new TreeStore(BuildStore({}, 11));
    phantom_ = new TreeStore(BuildStore(Phantom(), 21));
    inflated_ = new TreeStore(BuildStore(Inflation(), 31));
    noisy_ = new TreeStore(BuildStore(Noise(), 41));
  }
  static void TearDownTestSuite() {
    for (TreeStore* s : {exact_, phantom_, inflated_, noisy_}) delete s;
  }

  // Engine report for every episode, checked against the oracle and the
  // report invariants. Returns the total match count.
  static long CheckedTotal(const QueryRule& rule, const TreeStore& store,
                           bool model_predicted_only = false) {
    const oracle::QueryOracle oracle(store);
    long total = 0;
    for (const EpisodeRow& e : store.episodes()) {
      ViolationReport r = Evaluate(rule, store, e.id, {model_predicted_only});
      const oracle::OracleResult o = oracle.Run(rule, e.id, model_predicted_only);
      EXPECT_EQ(r.matches, o.matches) << rule.name << " " << e.id;
      EXPECT_EQ(r.evaluation_errors, o.errors);
      EXPECT_EQ(r.total_rows_scanned, o.scanned);
      long sum = 0;
      for (const auto& [d, c] : r.per_decision_counts) sum += c;
      EXPECT_EQ(sum, r.total());
      EXPECT_EQ(static_cast<int>(r.per_decision_counts.size()), e.decisions());
      for (size_t i = 1; i < r.matches.size(); ++i) {
        EXPECT_LT(r.matches[i - 1].output_state, r.matches[i].output_state);
      }
      total += r.total();
    }
    return total;
  }

  static TreeStore* exact_;
  static TreeStore* phantom_;
  static TreeStore* inflated_;
  static TreeStore* noisy_;
};

TreeStore* QueryEngineTest::exact_ = nullptr;
TreeStore* QueryEngineTest::phantom_ = nullptr;
TreeStore* QueryEngineTest::inflated_ = nullptr;
TreeStore* QueryEngineTest::noisy_ = nullptr;

TEST_F(QueryEngineTest, PhantomImmortalsBreakCausality) {
  const QueryRule rule = ParseReferenceRule(kImmortalsWithoutBuildings);
  EXPECT_EQ(CheckedTotal(rule, *exact_), 0);
  EXPECT_GT(CheckedTotal(rule, *phantom_), 0);
}

TEST_F(QueryEngineTest, HealthInflationIsCaught) {
  const QueryRule rule = ParseReferenceRule(kEnemyTopHealthRises);
  EXPECT_EQ(CheckedTotal(rule, *exact_), 0);
  EXPECT_GT(CheckedTotal(rule, *inflated_), 0);
}

TEST_F(QueryEngineTest, UndefendedBottomBaseRuleMatchesOracle) {
  const QueryRule rule = ParseReferenceRule(kUndefendedBottomDamage);
  for (const TreeStore* s : {exact_, phantom_, inflated_, noisy_}) CheckedTotal(rule, *s);
}

TEST_F(QueryEngineTest, SymmetryRules) {
  const QueryRule flip = ParseReferenceRule(kFlipMarineMismatch);
  const QueryRule reverse = ParseReferenceRule(kReverseMarineMismatch);
  EXPECT_EQ(CheckedTotal(flip, *exact_), 0);
  EXPECT_EQ(CheckedTotal(reverse, *exact_), 0);
  EXPECT_GT(CheckedTotal(reverse, *noisy_), 0);
  EXPECT_GT(CheckedTotal(flip, *noisy_), 0);

  QueryRule tolerance = ParseRule(RuleClass::kSymmetryFlip,
                                  "outputState.probabilityOfWinInTopLane - "
                                  "outputStateForFlippedInputs.probabilityOfWinInBottomLane > 0.1");
  EXPECT_EQ(CheckedTotal(tolerance, *exact_), 0);
}

TEST_F(QueryEngineTest, SymmetryNeedsMaterializedTwins) {
  const GameConfig config = GameConfig::Shrunken();
  const ModelBundle bundle = MakeExactBundle(config);
  RandomAgent random(config);
  TreeStore store;
  const std::string id =
      store.Ingest(RecordEpisode(config, bundle, "exact", random, 3, Player::kFriendly)).episode_id;
  store.MaterializeCounterfactuals(id, bundle, Transform::kFlipLanes);
  EXPECT_NO_THROW(Evaluate(ParseReferenceRule(kFlipMarineMismatch), store, id));
  try {
    Evaluate(ParseReferenceRule(kReverseMarineMismatch), store, id);
    FAIL() << "expected MissingCounterfactualsError";
  } catch (const MissingCounterfactualsError& e) {
    EXPECT_NE(std::string(e.what()).find("materialize first"), std::string::npos);
  }
}

TEST_F(QueryEngineTest, WrongClassAndUnknownEpisode) {
  const std::string id = exact_->episodes()[0].id;
  EXPECT_THROW(EvaluateStatic(ParseReferenceRule(kEnemyTopHealthRises), *exact_, id), ConfigError);
  EXPECT_THROW(EvaluateTransition(ParseReferenceRule(kImmortalsWithoutBuildings), *exact_, id), ConfigError);
  EXPECT_THROW(EvaluateSymmetry(ParseReferenceRule(kEnemyTopHealthRises), *exact_, id), ConfigError);
  EXPECT_THROW(Evaluate(ParseReferenceRule(kEnemyTopHealthRises), *exact_, "e999"), NotFoundError);
}

TEST_F(QueryEngineTest, CatalogDriftAborts) {
  QueryRule rule = ParseReferenceRule(kEnemyTopHealthRises);
  auto drifted = std::make_shared<Expr>(*rule.expr);
  auto lhs = std::make_shared<Expr>(*rule.expr->lhs);
  auto inner = std::make_shared<Expr>(*lhs->lhs);
  inner->ref.name = "enemyHealthMiddle";
  lhs->lhs = inner;
  drifted->lhs = lhs;
  rule.expr = drifted;
  EXPECT_THROW(Evaluate(rule, *exact_, exact_->episodes()[0].id), RuleError);
}

TEST_F(QueryEngineTest, DivisionByZeroIsCountedNotMatched) {
  const std::string id = exact_->episodes()[0].id;
  QueryRule always = ParseRule(
      RuleClass::kStaticState,
      "outputState.wave / (outputState.friendlyCurrency - outputState.friendlyCurrency) > 0");
  ViolationReport r = Evaluate(always, *exact_, id);
  EXPECT_EQ(r.total(), 0);
  EXPECT_EQ(r.evaluation_errors, r.total_rows_scanned);
  EXPECT_GT(r.total_rows_scanned, 0);

  QueryRule guarded = ParseRule(RuleClass::kStaticState,
                                "outputState.enemyHealthTop = 0 OR "
                                "100 / outputState.enemyHealthTop > 0");
  r = Evaluate(guarded, *exact_, id);
  EXPECT_EQ(r.evaluation_errors, 0);
  EXPECT_EQ(r.total(), r.total_rows_scanned);
  CheckedTotal(always, *exact_);
}

TEST_F(QueryEngineTest, HandBuiltStoreHasExactlyOneLostButHopefulRow) {
  const GameConfig config = GameConfig::Shrunken();
  SearchTree tree;
  tree.nodes.resize(5);
  for (int i = 0; i < 5; ++i) {
    TreeNode& n = tree.nodes[i];
    n.id = i;
    n.state = InitialState(config);
    if (i > 0) {
      n.depth = 1;
      n.parent = 0;
      n.parent_actions = ActionPair{EmptyAction(), EmptyAction()};
      n.friendly_index = 0;
      n.enemy_index = 0;
      tree.nodes[0].children.push_back(i);
    }
  }
  tree.nodes[1].state.health[0][0] = 0;  // lost, believes it can still win
  tree.nodes[1].win_probabilities = {0.0, 0.25, 0.75, 0.0};
  tree.nodes[2].state.health[0][0] = 0;  // lost, and knows it
  tree.nodes[2].win_probabilities = {0.0, 0.0, 1.0, 0.0};
  tree.nodes[3].win_probabilities = {0.5, 0.5, 0.0, 0.0};
  EpisodeArtifact ep;
  ep.bundle = "hand";
  ep.config_hash = config.Hash();
  ep.wave_count = 1;
  ep.trees.push_back(tree);
  TreeStore store;
  const std::string id = store.Ingest(ep).episode_id;
  ASSERT_EQ(store.states().size(), 5u);
  ViolationReport r = Evaluate(ParseReferenceRule(kLostButHopeful), store, id);
  ASSERT_EQ(r.total(), 1);
  EXPECT_EQ(r.matches[0].output_state, 1);
  EXPECT_EQ(r.per_decision_counts.at(0), 1);
  EXPECT_EQ(r.total_rows_scanned, 5);
  EXPECT_EQ(Evaluate(ParseReferenceRule(kLostButHopeful), store, id, {true}).total_rows_scanned, 4);
}

TEST_F(QueryEngineTest, DeterministicAndScopeMonotone) {
  const QueryRule rule = ParseReferenceRule(kImmortalsWithoutBuildings);
  const std::string id = phantom_->episodes()[0].id;
  ViolationReport a = Evaluate(rule, *phantom_, id);
  ViolationReport b = Evaluate(rule, *phantom_, id);
  EXPECT_EQ(a.matches, b.matches);
  EXPECT_EQ(a.per_decision_counts, b.per_decision_counts);
  EXPECT_LE(Evaluate(rule, *phantom_, id, {true}).total(), a.total());

  auto all = Evaluate(rule, *phantom_, QueryScope{});
  ASSERT_EQ(all.size(), phantom_->episodes().size());
  auto one = Evaluate(rule, *phantom_, QueryScope{{id}, {}});
  ASSERT_EQ(one.size(), 1u);
  long wide = 0;
  for (const auto& r : all) wide += r.total();
  EXPECT_GE(wide, one[0].total());
  CheckedTotal(rule, *phantom_, true);
}

TEST_F(QueryEngineTest, RandomRulesAgreeWithOracle) {
  const RuleClass classes[] = {RuleClass::kStaticState, RuleClass::kTransition,
                               RuleClass::kSymmetryFlip, RuleClass::kSymmetryReverse};
  for (RuleClass c : classes) {
    oracle::RuleGenerator gen(c, 77 + static_cast<int>(c));
    for (int i = 0; i < 40; ++i) {
      QueryRule rule;
      rule.name = "random";
      rule.rule_class = c;
      rule.expr = gen.Boolean(1 + i % 4);
      SCOPED_TRACE(PrettyPrint(rule));
      CheckedTotal(rule, *noisy_);
    }
  }
}

TEST_F(QueryEngineTest, TreeSliceKeepsRootToMatchPaths) {
  const QueryRule rule = ParseReferenceRule(kEnemyTopHealthRises);
  const EpisodeRow& e = inflated_->episodes()[0];
  ViolationReport r = Evaluate(rule, *inflated_, e.id);
  ASSERT_GT(r.total(), 0);
  const StatesTable& st = inflated_->states();
  const oracle::QueryOracle oracle(*inflated_);
  bool saw_single = false, saw_multi = false;
  for (const auto& [d, count] : r.per_decision_counts) {
    TreeSlice slice = MakeTreeSlice(r, *inflated_, d);
    SearchTree tree = inflated_->ReconstructTree(e.id, d);
    std::vector<char> path(tree.nodes.size(), 0);
    for (const Match& m : r.matches) {
      if (m.decision != d) continue;
      for (int n = static_cast<int>(m.output_state - slice.nodes[0].row); n >= 0;
           n = tree.nodes[n].parent) {
        path[n] = 1;
      }
    }
    path[0] = 1;
    std::vector<int> expect;
    for (const TreeNode& n : tree.nodes) {
      if (path[n.id] || (n.parent >= 0 && path[n.parent])) expect.push_back(n.id);
    }
    std::vector<int> got;
    int highlighted = 0;
    for (const SliceNode& n : slice.nodes) {
      got.push_back(n.node);
      EXPECT_EQ(n.stub, !path[n.node]);
      if (n.highlighted) {
        ++highlighted;
        // Re-evaluate the highlighted path on its own.
        Match m{d, st.parent_state[n.row], st.parent_action[n.row], n.row, kNoRow};
        EXPECT_TRUE(std::find(r.matches.begin(), r.matches.end(), m) != r.matches.end());
        const double rise = st.attributes[*FindStateAttribute("enemyHealthTop")][n.row] -
                            st.attributes[*FindStateAttribute("enemyHealthTop")][m.input_state];
        EXPECT_GT(rise, 5.0);
      }
    }
    EXPECT_EQ(got, expect);
    EXPECT_EQ(highlighted, count);
    if (count == 0) {
      EXPECT_EQ(slice.nodes.size(), 1 + tree.nodes[0].children.size());
    }
    saw_single |= count == 1;
    saw_multi |= count > 1;
  }
  EXPECT_TRUE(saw_multi || saw_single);
  EXPECT_THROW(MakeTreeSlice(r, *inflated_, 999), NotFoundError);
}

TEST_F(QueryEngineTest, ReportExports) {
  const QueryRule rule = ParseReferenceRule(kEnemyTopHealthRises);
  const std::string id = inflated_->episodes()[0].id;
  ViolationReport r = Evaluate(rule, *inflated_, id);
  std::ostringstream out;
  WriteReportJsonl(r, out);
  std::istringstream in(out.str());
  std::string line;
  long lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["type"], lines == 0 ? "report" : "match");
    ++lines;
  }
  EXPECT_EQ(lines, 1 + r.total());
  auto j = ToJson(r);
  EXPECT_EQ(j["totalMatches"], r.total());
  EXPECT_EQ(j["ruleClass"], "transition");
  const std::string table = FormatSummaryTable({r});
  EXPECT_NE(table.find("enemyTopHealthRises"), std::string::npos);
  EXPECT_NE(table.find(id), std::string::npos);
}

}  // namespace
}  // namespace tugcheck
