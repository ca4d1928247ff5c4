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


#include "tugcheck/tree_store.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tugcheck/common.h"

namespace tugcheck {
namespace {

namespace fs = std::filesystem;

EpisodeArtifact ShrunkenEpisode(const ModelBundle& bundle, std::uint64_t seed,
                                Player side = Player::kFriendly) {
  GameConfig config = GameConfig::Shrunken();
  RandomAgent random(config);
  return RecordEpisode(config, bundle, "exact", random, seed, side);
}

// One decision point whose tree is root -> empty/empty -> empty/empty.
EpisodeArtifact SinglePathEpisode() {
  GameConfig config;
  config.income_per_wave = 0;
  AbstractState s = InitialState(config);
  s.currency = {0, 0};
  EpisodeArtifact ep;
  ep.bundle = "exact";
  ep.config_hash = config.Hash();
  ep.wave_count = 1;
  ep.trees.push_back(BuildTree(MakeExactBundle(config), s));
  return ep;
}

TEST(EpisodeTest, SerializationRoundTripIsExact) {
  EpisodeArtifact ep = ShrunkenEpisode(MakeExactBundle(GameConfig::Shrunken()), 5);
  ASSERT_FALSE(ep.trees.empty());
  std::istringstream in(SerializeEpisode(ep));
  EpisodeArtifact back = ReadEpisode(in);
  EXPECT_EQ(back.trees, ep.trees);
  EXPECT_EQ(back.is_win, ep.is_win);
  EXPECT_EQ(back.config_hash, ep.config_hash);
  EXPECT_EQ(SerializeEpisode(back), SerializeEpisode(ep));
}

TEST(EpisodeTest, RecordingIsDeterministic) {
  const ModelBundle bundle = MakeExactBundle(GameConfig::Shrunken());
  EXPECT_EQ(SerializeEpisode(ShrunkenEpisode(bundle, 9)),
            SerializeEpisode(ShrunkenEpisode(bundle, 9)));
}

TEST(EpisodeTest, ValidationNamesTheOffendingNode) {
  EpisodeArtifact ep = SinglePathEpisode();
  ep.trees[0].nodes[2].depth = 3;
  try {
    ValidateEpisode(ep);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("node 2"), std::string::npos) << e.what();
  }
  ep = SinglePathEpisode();
  ep.trees[0].nodes[1].parent_actions.reset();
  EXPECT_THROW(ValidateEpisode(ep), FormatError);
  ep = SinglePathEpisode();
  ep.trees[0].nodes[0].children.clear();
  EXPECT_THROW(ValidateEpisode(ep), FormatError);

  std::istringstream garbage("{\"format\":\"tugcheck-episode\",\"version\":1}\n");
  EXPECT_THROW(ReadEpisode(garbage), FormatError);
  std::istringstream truncated(SerializeEpisode(SinglePathEpisode()).substr(0, 400));
  EXPECT_THROW(ReadEpisode(truncated), FormatError);
}

TEST(TreeStoreTest, SinglePathCounts) {
  TreeStore store;
  IngestResult r = store.Ingest(SinglePathEpisode());
  EXPECT_EQ(r.episode_id, "e1");
  EXPECT_EQ(r.states, 3);
  EXPECT_EQ(r.actions, 2);
  EXPECT_EQ(r.win_probs, 3);
  auto rows = store.StatesOf("e1", 0);
  ASSERT_EQ(rows.size(), 3u);
  for (size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(store.states().depth[rows[i]], static_cast<int>(i));
  EXPECT_EQ(store.states().is_root[rows[0]], 1);
  EXPECT_EQ(store.states().model_predicted[rows[0]], 0);
  EXPECT_EQ(store.states().model_predicted[rows[2]], 1);

  auto transitions = store.TransitionsOf("e1", 0);
  ASSERT_EQ(transitions.size(), 2u);
  for (const Transition& t : transitions) {
    EXPECT_EQ(store.actions().child_state[t.action], t.output_state);
    EXPECT_EQ(store.actions().parent_state[t.action], t.input_state);
    EXPECT_EQ(store.states().depth[t.output_state], store.states().depth[t.input_state] + 1);
  }
}

TEST(TreeStoreTest, ReingestIsIdempotent) {
  TreeStore store;
  EpisodeArtifact ep = SinglePathEpisode();
  store.Ingest(ep);
  IngestResult again = store.Ingest(ep);
  EXPECT_TRUE(again.duplicate);
  EXPECT_EQ(again.episode_id, "e1");
  EXPECT_EQ(store.states().size(), 3u);
  EXPECT_EQ(store.episodes().size(), 1u);
  ep.seed = 99;
  EXPECT_EQ(store.Ingest(ep).episode_id, "e2");
}

TEST(TreeStoreTest, RowCountsMatchArtifactAndTreesReconstruct) {
  const ModelBundle bundle = MakeExactBundle(GameConfig::Shrunken());
  TreeStore store;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    EpisodeArtifact ep = ShrunkenEpisode(bundle, seed);
    IngestResult r = store.Ingest(ep);
    long nodes = 0;
    for (const auto& t : ep.trees) nodes += static_cast<long>(t.nodes.size());
    EXPECT_EQ(r.states, nodes);
    EXPECT_EQ(r.actions, nodes - static_cast<long>(ep.trees.size()));
    EpisodeSummary s = store.Summary(r.episode_id);
    EXPECT_EQ(s.decisions, static_cast<int>(ep.trees.size()));
    EXPECT_EQ(s.transitions, r.actions);
    for (size_t d = 0; d < ep.trees.size(); ++d) {
      SearchTree want = ep.trees[d];
      want.episode_id = r.episode_id;
      EXPECT_EQ(store.ReconstructTree(r.episode_id, static_cast<int>(d)), want);
    }
  }
}

TEST(TreeStoreTest, ReferentialIntegrity) {
  const ModelBundle bundle = MakeExactBundle(GameConfig::Shrunken());
  TreeStore store;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    auto id = store.Ingest(ShrunkenEpisode(bundle, seed)).episode_id;
    store.MaterializeCounterfactuals(id, bundle, Transform::kFlipLanes);
  }
  const StatesTable& s = store.states();
  for (size_t r = 0; r < s.size(); ++r) {
    EXPECT_EQ(store.win_probs().parent_state[r], static_cast<RowId>(r));
    if (s.is_root[r]) {
      EXPECT_EQ(s.parent_state[r], kNoRow);
      continue;
    }
    const RowId p = s.parent_state[r];
    const RowId a = s.parent_action[r];
    ASSERT_GE(p, 0);
    ASSERT_LT(p, static_cast<RowId>(r));
    ASSERT_LT(a, static_cast<RowId>(store.actions().size()));
    EXPECT_EQ(store.actions().child_state[a], static_cast<RowId>(r));
    EXPECT_EQ(store.actions().parent_state[a], p);
    EXPECT_EQ(s.episode[p], s.episode[r]);
    EXPECT_EQ(s.decision[p], s.decision[r]);
  }
  const auto& cf = store.counterfactuals(Transform::kFlipLanes);
  for (size_t i = 0; i < cf.size(); ++i) {
    EXPECT_EQ(cf.twin[cf.origin[i]], static_cast<RowId>(i));
  }
}

void CheckExactCounterfactuals(Transform t) {
  const ModelBundle bundle = MakeExactBundle(GameConfig::Shrunken());
  TreeStore store;
  const auto id = store.Ingest(ShrunkenEpisode(bundle, 4)).episode_id;
  EXPECT_FALSE(store.HasCounterfactuals(0, t));
  const long rows = store.MaterializeCounterfactuals(id, bundle, t);
  EXPECT_TRUE(store.HasCounterfactuals(0, t));
  EXPECT_EQ(rows, store.Summary(id).transitions);
  EXPECT_EQ(store.MaterializeCounterfactuals(id, bundle, t), 0);
  const auto& cf = store.counterfactuals(t);
  for (RowId i = 0; i < static_cast<RowId>(cf.size()); ++i) {
    const RowId origin = cf.origin[i];
    ASSERT_EQ(store.CounterfactualStateAt(t, i), Apply(t, store.StateAt(origin)));
    ASSERT_EQ(store.CounterfactualWinProbAt(t, i), Apply(t, store.WinProbAt(origin)));
    ASSERT_EQ(store.CounterfactualActionAt(t, i),
              Apply(t, store.ActionAt(store.states().parent_action[origin])));
  }
}

TEST(CounterfactualTest, ExactFlipMirrorsEveryRow) { CheckExactCounterfactuals(Transform::kFlipLanes); }

TEST(CounterfactualTest, ExactReverseMirrorsEveryRow) {
  CheckExactCounterfactuals(Transform::kReversePlayers);
}

TEST(CounterfactualTest, EmptyEpisodeHasNoRows) {
  TreeStore store;
  EpisodeArtifact ep;
  ep.bundle = "exact";
  const auto id = store.Ingest(ep).episode_id;
  EXPECT_EQ(store.MaterializeCounterfactuals(id, MakeExactBundle(GameConfig{}),
                                             Transform::kFlipLanes),
            0);
  EXPECT_TRUE(store.HasCounterfactuals(0, Transform::kFlipLanes));
}

TEST(CounterfactualTest, AsymmetryNoiseBreaksTheMirror) {
  const GameConfig config = GameConfig::Shrunken();
  FlawSpec flaws;
  flaws.asymmetry_noise = AsymmetryNoise{2};
  flaws.seed = 3;
  const ModelBundle noisy = WithFlaws(MakeExactBundle(config), flaws);
  TreeStore store;
  const auto id = store.Ingest(ShrunkenEpisode(noisy, 6)).episode_id;
  store.MaterializeCounterfactuals(id, noisy, Transform::kFlipLanes);
  const auto& cf = store.counterfactuals(Transform::kFlipLanes);
  long differing = 0;
  for (RowId i = 0; i < static_cast<RowId>(cf.size()); ++i) {
    differing += store.CounterfactualStateAt(Transform::kFlipLanes, i) !=
                 FlipLanes(store.StateAt(cf.origin[i]));
  }
  EXPECT_GT(differing, 0);
}

TEST(TreeStoreTest, SnapshotRoundTrip) {
  const ModelBundle bundle = MakeExactBundle(GameConfig::Shrunken());
  TreeStore store;
  const auto id = store.Ingest(ShrunkenEpisode(bundle, 2)).episode_id;
  store.Ingest(SinglePathEpisode());
  store.MaterializeCounterfactuals(id, bundle, Transform::kReversePlayers);
  const std::string path = (fs::path(::testing::TempDir()) / "tugcheck_store.bin").string();
  store.Save(path);
  TreeStore back = TreeStore::Load(path);
  ASSERT_EQ(back.episodes().size(), 2u);
  EXPECT_EQ(back.states().attributes, store.states().attributes);
  EXPECT_EQ(back.states().backed_up_value, store.states().backed_up_value);
  EXPECT_EQ(back.actions().attributes, store.actions().attributes);
  EXPECT_EQ(back.win_probs().values, store.win_probs().values);
  EXPECT_EQ(back.counterfactuals(Transform::kReversePlayers).attributes,
            store.counterfactuals(Transform::kReversePlayers).attributes);
  EXPECT_TRUE(back.HasCounterfactuals(0, Transform::kReversePlayers));
  EXPECT_FALSE(back.HasCounterfactuals(1, Transform::kReversePlayers));
  EXPECT_EQ(back.ReconstructTree("e1", 0), store.ReconstructTree("e1", 0));
  EXPECT_TRUE(back.Ingest(SinglePathEpisode()).duplicate);

  std::ofstream(path, std::ios::binary) << "not a store";
  EXPECT_THROW(TreeStore::Load(path), FormatError);
}

TEST(TreeStoreTest, UnknownIdsAreNotFound) {
  TreeStore store;
  store.Ingest(SinglePathEpisode());
  EXPECT_THROW(store.StatesOf("e2", 0), NotFoundError);
  EXPECT_THROW(store.StatesOf("e1", 1), NotFoundError);
  EXPECT_THROW(store.Summary("x1"), NotFoundError);
  EXPECT_THROW(store.StateAt(3), NotFoundError);
  EXPECT_THROW(store.ActionAt(-1), NotFoundError);
  EXPECT_THROW(store.MaterializeCounterfactuals("e9", MakeExactBundle(GameConfig{}),
                                                Transform::kFlipLanes),
               NotFoundError);
}

}  // namespace
}  // namespace tugcheck
