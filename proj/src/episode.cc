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


#include "tugcheck/episode.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tugcheck/common.h"
#include "tugcheck/match.h"
#include "tugcheck/state_json.h"

namespace tugcheck {

using nlohmann::json;

namespace {

json NodeToJson(int decision, const TreeNode& n) {
  json actions = nullptr;
  if (n.parent_actions) {
    actions = {{"friendly", ToJson(n.parent_actions->friendly)},
               {"enemy", ToJson(n.parent_actions->enemy)}};
  }
  return {{"type", "node"},
          {"decision", decision},
          {"id", n.id},
          {"depth", n.depth},
          {"parent", n.parent},
          {"state", ToJson(n.state)},
          {"winProb", ToJson(n.win_probabilities)},
          {"actions", actions},
          {"friendlyIndex", n.friendly_index},
          {"enemyIndex", n.enemy_index},
          {"reward", ToJson(n.reward)},
          {"terminal", n.terminal},
          {"value", n.backed_up_value}};
}

TreeNode NodeFromJson(const json& j) {
  TreeNode n;
  n.id = j.at("id").get<int>();
  n.depth = j.at("depth").get<int>();
  n.parent = j.at("parent").get<int>();
  n.state = StateFromJson(j.at("state"));
  n.win_probabilities = Vector4FromJson(j.at("winProb"));
  const json& a = j.at("actions");
  if (!a.is_null()) {
    n.parent_actions = ActionPair{ActionFromJson(a.at("friendly")), ActionFromJson(a.at("enemy"))};
  }
  n.friendly_index = j.at("friendlyIndex").get<int>();
  n.enemy_index = j.at("enemyIndex").get<int>();
  n.reward = Vector4FromJson(j.at("reward"));
  n.terminal = j.at("terminal").get<bool>();
  n.backed_up_value = j.at("value").get<double>();
  return n;
}

[[noreturn]] void Bad(const std::string& source, int line, const std::string& what) {
  throw FormatError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void WriteEpisode(const EpisodeArtifact& episode, std::ostream& out) {
  out << json{{"format", "tugcheck-episode"},
              {"version", kEpisodeFormatVersion},
              {"bundle", episode.bundle},
              {"configHash", HexDigest(episode.config_hash)},
              {"seed", episode.seed},
              {"isWin", episode.is_win},
              {"waveCount", episode.wave_count},
              {"plannerSide", PlayerName(episode.planner_side)},
              {"decisions", episode.trees.size()}}
             .dump()
      << '\n';
  for (size_t d = 0; d < episode.trees.size(); ++d) {
    const SearchTree& t = episode.trees[d];
    const PruneWidths& w = t.widths;
    out << json{{"type", "tree"},
                {"decision", static_cast<int>(d)},
                {"root", t.root},
                {"nodes", t.nodes.size()},
                {"chosen", ToJson(t.chosen_action)},
                {"widths",
                 {w.root_friendly, w.root_enemy, w.inner_friendly, w.inner_enemy}}}
               .dump()
        << '\n';
    for (const TreeNode& n : t.nodes) out << NodeToJson(static_cast<int>(d), n).dump() << '\n';
  }
}

std::string SerializeEpisode(const EpisodeArtifact& episode) {
  std::ostringstream out;
  WriteEpisode(episode, out);
  return out.str();
}

void SaveEpisode(const EpisodeArtifact& episode, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write episode " + path);
  WriteEpisode(episode, out);
}

EpisodeArtifact ReadEpisode(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) Bad(source, line_no, "empty episode file");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() ||
      header.value("format", "") != "tugcheck-episode") {
    Bad(source, line_no, "not an episode artifact");
  }
  if (header.value("version", 0) != kEpisodeFormatVersion) {
    Bad(source, line_no, "unsupported episode version");
  }
  EpisodeArtifact ep;
  size_t expected_trees = 0;
  try {
    ep.bundle = header.at("bundle").get<std::string>();
    ep.config_hash = std::stoull(header.at("configHash").get<std::string>(), nullptr, 16);
    ep.seed = header.at("seed").get<std::uint64_t>();
    ep.is_win = header.at("isWin").get<bool>();
    ep.wave_count = header.at("waveCount").get<int>();
    ep.planner_side = ParsePlayer(header.at("plannerSide").get<std::string>());
    expected_trees = header.at("decisions").get<size_t>();
  } catch (const std::exception& e) {
    Bad(source, line_no, std::string("bad header: ") + e.what());
  }
  size_t expected_nodes = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) Bad(source, line_no, "bad JSON");
    try {
      const std::string type = j.at("type").get<std::string>();
      const int decision = j.at("decision").get<int>();
      if (type == "tree") {
        if (!ep.trees.empty() && ep.trees.back().nodes.size() != expected_nodes) {
          Bad(source, line_no, "previous tree is missing nodes");
        }
        if (decision != static_cast<int>(ep.trees.size())) {
          Bad(source, line_no, "decision points out of order");
        }
        SearchTree t;
        t.decision_index = decision;
        t.root = j.at("root").get<int>();
        t.chosen_action = ActionFromJson(j.at("chosen"));
        const auto w = j.at("widths").get<std::vector<int>>();
        if (w.size() != 4) Bad(source, line_no, "widths must have 4 entries");
        t.widths = {w[0], w[1], w[2], w[3]};
        expected_nodes = j.at("nodes").get<size_t>();
        ep.trees.push_back(std::move(t));
      } else if (type == "node") {
        if (ep.trees.empty() || decision != static_cast<int>(ep.trees.size()) - 1) {
          Bad(source, line_no, "node outside its tree");
        }
        ep.trees.back().nodes.push_back(NodeFromJson(j));
      } else {
        Bad(source, line_no, "unknown record type '" + type + "'");
      }
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      Bad(source, line_no, e.what());
    }
  }
  if (!ep.trees.empty() && ep.trees.back().nodes.size() != expected_nodes) {
    Bad(source, line_no, "last tree is missing nodes");
  }
  if (ep.trees.size() != expected_trees) Bad(source, line_no, "decision count mismatch");
  for (SearchTree& t : ep.trees) {
    for (TreeNode& n : t.nodes) {
      if (n.parent >= 0 && n.parent < static_cast<int>(t.nodes.size())) {
        t.nodes[n.parent].children.push_back(n.id);
      }
    }
  }
  ValidateEpisode(ep);
  return ep;
}

EpisodeArtifact LoadEpisode(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open episode " + path);
  return ReadEpisode(in, path);
}

void ValidateEpisode(const EpisodeArtifact& episode) {
  for (size_t d = 0; d < episode.trees.size(); ++d) {
    const SearchTree& t = episode.trees[d];
    auto fail = [&](int node, const std::string& what) {
      throw FormatError("decision " + std::to_string(d) + ", node " + std::to_string(node) +
                        ": " + what);
    };
    if (t.nodes.empty()) fail(0, "tree has no nodes");
    if (t.root != 0) fail(t.root, "root must be node 0");
    for (size_t i = 0; i < t.nodes.size(); ++i) {
      const TreeNode& n = t.nodes[i];
      const int id = static_cast<int>(i);
      if (n.id != id) fail(id, "node ids must be dense and ordered");
      if (id == 0) {
        if (n.parent != -1 || n.depth != 0 || n.parent_actions) fail(id, "malformed root");
      } else {
        if (n.parent < 0 || n.parent >= id) fail(id, "parent must precede the node");
        if (!n.parent_actions) fail(id, "non-root node without parent actions");
        if (n.depth != t.nodes[n.parent].depth + 1) fail(id, "depth is not parent depth + 1");
        if (n.depth > 2) fail(id, "depth exceeds 2");
      }
      int last = id;
      for (int c : n.children) {
        if (c <= last || c >= static_cast<int>(t.nodes.size()) || t.nodes[c].parent != id) {
          fail(id, "inconsistent child list");
        }
        last = c;
      }
    }
    size_t linked = 0;
    for (const TreeNode& n : t.nodes) linked += n.children.size();
    if (linked + 1 != t.nodes.size()) fail(0, "tree is not connected");
  }
}

std::uint64_t ContentHash(const EpisodeArtifact& episode) {
  return HashBytes(SerializeEpisode(episode));
}

EpisodeArtifact RecordEpisode(const GameConfig& config, const ModelBundle& bundle,
                              const std::string& bundle_spec, Agent& opponent,
                              std::uint64_t seed, Player planner_side,
                              const PruneWidths& widths) {
  EpisodeArtifact ep;
  ep.bundle = bundle_spec;
  ep.config_hash = config.Hash();
  ep.seed = seed;
  ep.planner_side = planner_side;
  PlannerAgent planner(bundle, widths, [&](const SearchTree& tree, Player player) {
    if (player != planner_side) return;
    ep.trees.push_back(tree);
    ep.trees.back().episode_id.clear();
    ep.trees.back().decision_index = static_cast<int>(ep.trees.size()) - 1;
  });
  const bool friendly = planner_side == Player::kFriendly;
  GameResult result = PlayGame(config, friendly ? static_cast<Agent&>(planner) : opponent,
                               friendly ? opponent : static_cast<Agent&>(planner), seed);
  ep.is_win = result.outcome.winner == planner_side;
  ep.wave_count = result.waves;
  return ep;
}

}  // namespace tugcheck
