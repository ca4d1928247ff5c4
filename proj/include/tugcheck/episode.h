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


// Episode artifacts: every search tree the planner built during one game.
//
// On disk an artifact is line-delimited JSON. The first line is a header
//
//   {"format":"tugcheck-episode","version":1,"bundle":"exact",
//    "configHash":"...","seed":7,"isWin":true,"waveCount":5,
//    "plannerSide":"friendly","decisions":5}
//
// followed, per decision point, by a "tree" record and one "node" record per
// tree node in id order.

#ifndef TUGCHECK_EPISODE_H_
#define TUGCHECK_EPISODE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tugcheck/agents.h"
#include "tugcheck/planner.h"

namespace tugcheck {

inline constexpr int kEpisodeFormatVersion = 1;

struct EpisodeArtifact {
  std::string bundle;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  bool is_win = false;  // for the planning side
  int wave_count = 0;
  Player planner_side = Player::kFriendly;
  // Trees are in the planner's perspective (planner as friendly).
  std::vector<SearchTree> trees;
};

void WriteEpisode(const EpisodeArtifact& episode, std::ostream& out);
std::string SerializeEpisode(const EpisodeArtifact& episode);
void SaveEpisode(const EpisodeArtifact& episode, const std::string& path);

// Throws FormatError with the line number on malformed input and runs
// ValidateEpisode on the result.
EpisodeArtifact ReadEpisode(std::istream& in, const std::string& source = "<stream>");
EpisodeArtifact LoadEpisode(const std::string& path);

// Structural checks: dense node ids, root 0 without parent actions, parent
// links and child lists consistent, depth = parent depth + 1 and at most 2.
// Throws FormatError naming the first offending node.
void ValidateEpisode(const EpisodeArtifact& episode);

// Hash of the serialized artifact.
std::uint64_t ContentHash(const EpisodeArtifact& episode);

// Plays one game with a planner on `planner_side` against `opponent` and
// keeps every tree.
EpisodeArtifact RecordEpisode(const GameConfig& config, const ModelBundle& bundle,
                              const std::string& bundle_spec, Agent& opponent,
                              std::uint64_t seed, Player planner_side = Player::kFriendly,
                              const PruneWidths& widths = {});

}  // namespace tugcheck

#endif  // TUGCHECK_EPISODE_H_
