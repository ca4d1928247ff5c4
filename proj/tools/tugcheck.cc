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


// tugcheck command-line tool. Machine-readable results go to files named by
// flags; a short human summary goes to standard output.
//
// Exit status: 0 success, 1 a check failed (invalid rule file, or a sound
// rule matched in `query`), 2 usage or runtime error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tugcheck/api.h"
#include "tugcheck/drdqn.h"
#include "tugcheck/dynamics.h"
#include "tugcheck/episode.h"
#include "tugcheck/pool.h"
#include "tugcheck/query_engine.h"
#include "tugcheck/rule_dsl.h"
#include "tugcheck/tree_store.h"

namespace tugcheck {
namespace {

namespace fs = std::filesystem;

constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

GameConfig LoadConfig(const std::string& spec) {
  if (spec == "default") return GameConfig{};
  if (spec == "shrunken") return GameConfig::Shrunken();
  return GameConfig::Load(spec);
}

Player ParseSide(const std::string& s) { return ParsePlayer(s); }

TreeStore OpenStore(const std::string& path, bool create) {
  if (create && !fs::exists(path)) return TreeStore{};
  return TreeStore::Load(path);
}

std::unique_ptr<Agent> MakeOpponent(const std::string& spec, const GameConfig& config) {
  if (spec == "random") return std::make_unique<RandomAgent>(config);
  if (spec.rfind("planner:", 0) == 0) {
    return std::make_unique<PlannerAgent>(LoadBundle(spec.substr(8), config));
  }
  if (spec.rfind("q:", 0) == 0) {
    return std::make_unique<QAgent>(QNetwork::Load(spec.substr(2), config), config);
  }
  throw ConfigError("unknown opponent '" + spec + "' (random, planner:<bundle>, q:<weights>)");
}

struct PlayArgs {
  std::string config = "shrunken";
  std::string bundle = "exact";
  std::string opponent = "random";
  std::string side = "friendly";
  std::string out;
  int games = 1;
  std::uint64_t seed = 1;
};

int Play(const PlayArgs& a) {
  const GameConfig config = LoadConfig(a.config);
  const ModelBundle bundle = LoadBundle(a.bundle, config);
  auto opponent = MakeOpponent(a.opponent, config);
  fs::create_directories(a.out);
  int wins = 0;
  for (int g = 0; g < a.games; ++g) {
    const std::uint64_t seed = a.seed + g;
    EpisodeArtifact ep =
        RecordEpisode(config, bundle, a.bundle, *opponent, seed, ParseSide(a.side));
    const std::string path =
        (fs::path(a.out) / ("episode_s" + std::to_string(seed) + ".jsonl")).string();
    SaveEpisode(ep, path);
    wins += ep.is_win;
    std::cout << "seed " << seed << ": " << (ep.is_win ? "win" : "loss") << " after "
              << ep.wave_count << " waves, " << ep.trees.size() << " decisions -> " << path << '\n';
  }
  std::cout << "planner won " << wins << "/" << a.games << '\n';
  return 0;
}

struct TrainArgs {
  std::string config = "shrunken";
  std::string pool;
  std::string log;
  int generations = 1;
  int episodes = 2000;
  std::uint64_t seed = 1;
};

int Train(const TrainArgs& a) {
  const GameConfig config = LoadConfig(a.config);
  AgentPool pool = fs::exists(fs::path(a.pool) / "pool.txt") ? AgentPool::Load(a.pool, config)
                                                              : AgentPool::WithRandomAgent();
  std::ofstream log;
  if (!a.log.empty()) log.open(a.log);
  for (int g = 0; g < a.generations; ++g) {
    DrdqnParams params;
    params.seed = a.seed + g;
    DrdqnResult r = TrainDrdqn(pool, config, a.episodes, params, log.is_open() ? &log : nullptr);
    const std::string name = "gen" + std::to_string(pool.size());
    pool.Add({name, r.q, r.last_win_rate});
    pool.Save(a.pool);
    std::cout << name << ": " << r.episodes << " episodes, " << r.updates
              << " updates, win rate vs pool " << r.last_win_rate << '\n';
  }
  return 0;
}

struct CollectArgs {
  std::string config = "shrunken";
  std::string pool;
  std::string out;
  int episodes = 100;
  double random_fraction = 1.0;
  std::uint64_t seed = 1;
};

int Collect(const CollectArgs& a) {
  const GameConfig config = LoadConfig(a.config);
  const AgentPool pool =
      a.pool.empty() ? AgentPool::WithRandomAgent() : AgentPool::Load(a.pool, config);
  auto data = CollectDynamicsDataset(pool, a.episodes, a.random_fraction, config, a.seed);
  SaveDataset(data, config, a.out);
  std::cout << data.size() << " transitions from " << a.episodes << " episodes -> " << a.out
            << '\n';
  return 0;
}

struct FitArgs {
  std::string config = "shrunken";
  std::string data;
  std::string out;
  int epochs = 40;
  std::uint64_t seed = 1;
};

int Fit(const FitArgs& a) {
  const GameConfig config = LoadConfig(a.config);
  DynamicsParams params;
  params.epochs = a.epochs;
  params.seed = a.seed;
  DynamicsReport report;
  TransitionNetwork net = TrainDynamics(LoadDataset(a.data), config, params, &report);
  net.Save(a.out);
  std::cout << "trained on " << report.train_size << ", held out " << report.holdout_size
            << "\nhealth MAE " << report.health_mae << " (no-change baseline "
            << report.baseline_health_mae << ")\nreward MAE " << report.reward_mae << "\n-> "
            << a.out << '\n';
  return 0;
}

int Ingest(const std::string& store_path, const std::vector<std::string>& files) {
  TreeStore store = OpenStore(store_path, true);
  for (const std::string& f : files) {
    IngestResult r = store.Ingest(LoadEpisode(f));
    std::cout << f << " -> " << r.episode_id
              << (r.duplicate ? " (already stored)" : " (" + std::to_string(r.states) + " states)")
              << '\n';
  }
  store.Save(store_path);
  return 0;
}

struct CounterfactualArgs {
  std::string store;
  std::string bundle = "exact";
  std::string config = "shrunken";
  std::string transform = "both";
  std::vector<std::string> episodes;
};

int Counterfactuals(const CounterfactualArgs& a) {
  TreeStore store = OpenStore(a.store, false);
  const GameConfig config = LoadConfig(a.config);
  const ModelBundle bundle = LoadBundle(a.bundle, config);
  std::vector<Transform> transforms;
  if (a.transform == "flip" || a.transform == "both") transforms.push_back(Transform::kFlipLanes);
  if (a.transform == "reverse" || a.transform == "both") {
    transforms.push_back(Transform::kReversePlayers);
  }
  if (transforms.empty()) throw ConfigError("--transform must be flip, reverse or both");
  std::vector<std::string> ids = a.episodes;
  if (ids.empty()) {
    for (const EpisodeRow& e : store.episodes()) ids.push_back(e.id);
  }
  for (const std::string& id : ids) {
    if (store.episode(id).config_hash != config.Hash()) {
      throw ConfigError("episode " + id + " was recorded under a different game config");
    }
    for (Transform t : transforms) {
      const long added = store.MaterializeCounterfactuals(id, bundle, t);
      std::cout << id << " " << TransformName(t) << ": "
                << (added ? std::to_string(added) + " rows" : std::string("already present"))
                << '\n';
    }
  }
  store.Save(a.store);
  return 0;
}

int RulesCheck(const std::string& path) {
  try {
    for (const QueryRule& r : LoadRuleFile(path)) {
      std::cout << r.name << " [" << RuleClassName(r.rule_class) << ", "
                << SeverityName(r.severity) << "] " << PrettyPrint(r) << '\n';
    }
  } catch (const RuleError& e) {
    std::cerr << FormatDiagnostic(e.diagnostic()) << '\n';
    for (const std::string& s : e.diagnostic().suggestions) {
      std::cerr << "  did you mean " << s << "?\n";
    }
    return kExitCheckFailed;
  }
  return 0;
}

struct QueryArgs {
  std::string store;
  std::string rules;
  std::string out;
  std::vector<std::string> episodes;
  bool model_predicted_only = false;
};

int Query(const QueryArgs& a) {
  const TreeStore store = OpenStore(a.store, false);
  const std::vector<QueryRule> rules = LoadRuleFile(a.rules);
  QueryScope scope{a.episodes, {a.model_predicted_only}};
  std::vector<ViolationReport> all;
  std::ofstream out;
  if (!a.out.empty()) {
    out.open(a.out);
    if (!out) throw Error("cannot write " + a.out);
  }
  bool sound_violated = false;
  for (const QueryRule& rule : rules) {
    for (ViolationReport& r : Evaluate(rule, store, scope)) {
      if (out.is_open()) WriteReportJsonl(r, out);
      sound_violated |= r.severity == Severity::kSound && r.total() > 0;
      all.push_back(std::move(r));
    }
  }
  std::cout << FormatSummaryTable(all);
  return sound_violated ? kExitCheckFailed : 0;
}

HttpServer* g_server = nullptr;

void StopServer(int) {
  if (g_server) g_server->Stop();
}

struct ServeArgs {
  std::string snapshot;
  std::string rules;
  std::string host = "127.0.0.1";
  int port = 0;
};

int Serve(const ServeArgs& a) {
  auto store = std::make_shared<const TreeStore>(TreeStore::Load(a.snapshot));
  ApiService api(store, SnapshotIdOfFile(a.snapshot));
  if (!a.rules.empty()) {
    for (QueryRule r : LoadRuleFile(a.rules)) api.RegisterRule(std::move(r));
  }
  HttpServer server(api);
  const int port = server.Bind(a.host, a.port ? a.port : PortFromEnvironment());
  std::cout << "serving " << store->episodes().size() << " episodes on http://" << a.host << ":"
            << port << kApiPrefix << std::endl;
  g_server = &server;
  std::signal(SIGINT, StopServer);
  std::signal(SIGTERM, StopServer);
  server.Serve();
  g_server = nullptr;
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"tugcheck: behavioral testing workbench for a tree-search game agent"};
  app.require_subcommand(1);
  int status = 0;

  PlayArgs play;
  auto* p = app.add_subcommand("play", "play recorded games with the planner");
  p->add_option("--config", play.config, "default, shrunken or a config file");
  p->add_option("--bundle", play.bundle, "model bundle spec for the planner");
  p->add_option("--opponent", play.opponent, "random, planner:<bundle> or q:<weights>");
  p->add_option("--side", play.side, "planner side: friendly or enemy");
  p->add_option("--games", play.games)->check(CLI::PositiveNumber);
  p->add_option("--seed", play.seed);
  p->add_option("--out", play.out, "directory for episode artifacts")->required();
  p->callback([&] { status = Play(play); });

  TrainArgs train;
  auto* t = app.add_subcommand("train", "pool self-play DRDQN training");
  t->add_option("--config", train.config);
  t->add_option("--pool", train.pool, "pool directory (created when missing)")->required();
  t->add_option("--generations", train.generations)->check(CLI::PositiveNumber);
  t->add_option("--episodes", train.episodes, "episode budget per generation");
  t->add_option("--seed", train.seed);
  t->add_option("--log", train.log, "CSV training log");
  t->callback([&] { status = Train(train); });

  CollectArgs collect;
  auto* c = app.add_subcommand("collect", "collect a dynamics dataset");
  c->add_option("--config", collect.config);
  c->add_option("--pool", collect.pool, "pool directory; random agent only when omitted");
  c->add_option("--episodes", collect.episodes)->check(CLI::PositiveNumber);
  c->add_option("--random-fraction", collect.random_fraction)->check(CLI::Range(0.0, 1.0));
  c->add_option("--seed", collect.seed);
  c->add_option("--out", collect.out)->required();
  c->callback([&] { status = Collect(collect); });

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "train the dynamics network");
  f->add_option("--config", fit.config);
  f->add_option("--data", fit.data)->required()->check(CLI::ExistingFile);
  f->add_option("--out", fit.out, "weights file")->required();
  f->add_option("--epochs", fit.epochs);
  f->add_option("--seed", fit.seed);
  f->callback([&] { status = Fit(fit); });

  std::string ingest_store;
  std::vector<std::string> ingest_files;
  auto* in = app.add_subcommand("ingest", "add episode artifacts to a store");
  in->add_option("--store", ingest_store, "store file (created when missing)")->required();
  in->add_option("episodes", ingest_files)->required()->check(CLI::ExistingFile);
  in->callback([&] { status = Ingest(ingest_store, ingest_files); });

  CounterfactualArgs cf;
  auto* m = app.add_subcommand("counterfactuals", "materialize flipped/reversed predictions");
  m->add_option("--store", cf.store)->required()->check(CLI::ExistingFile);
  m->add_option("--bundle", cf.bundle);
  m->add_option("--config", cf.config);
  m->add_option("--transform", cf.transform, "flip, reverse or both");
  m->add_option("--episode", cf.episodes, "episode id; every episode when omitted");
  m->callback([&] { status = Counterfactuals(cf); });

  std::string rules_file;
  auto* r = app.add_subcommand("rules", "rule file utilities");
  r->require_subcommand(1);
  auto* rc = r->add_subcommand("check", "parse and validate a rule file");
  rc->add_option("file", rules_file)->required()->check(CLI::ExistingFile);
  rc->callback([&] { status = RulesCheck(rules_file); });

  QueryArgs query;
  auto* q = app.add_subcommand("query", "evaluate a rule file over a store");
  q->add_option("--store", query.store)->required()->check(CLI::ExistingFile);
  q->add_option("--rules", query.rules)->required()->check(CLI::ExistingFile);
  q->add_option("--episode", query.episodes, "episode id; every episode when omitted");
  q->add_option("--out", query.out, "line-delimited report file");
  q->add_flag("--model-predicted-only", query.model_predicted_only);
  q->callback([&] { status = Query(query); });

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "serve the HTTP API");
  s->add_option("--snapshot", serve.snapshot)->required()->check(CLI::ExistingFile);
  s->add_option("--rules", serve.rules, "rule file to preload");
  s->add_option("--host", serve.host);
  s->add_option("--port", serve.port, "defaults to $TUGCHECK_PORT, else 8080");
  s->callback([&] { status = Serve(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  } catch (const RuleError& e) {
    std::cerr << "error: " << FormatDiagnostic(e.diagnostic()) << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return status;
}

}  // namespace
}  // namespace tugcheck

int main(int argc, char** argv) { return tugcheck::Main(argc, argv); }
