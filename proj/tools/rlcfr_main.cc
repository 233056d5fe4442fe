// Copyright 2026 The rlcfr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "rlcfr/config.h"
#include "rlcfr/error.h"
#include "rlcfr/eval.h"
#include "rlcfr/trainer.h"

namespace {

using namespace rlcfr;

struct Globals {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out = ".";
  std::string game;
};

ExperimentConfig resolve(const Globals& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  if (!g.game.empty()) cfg.train.game = GameConfig::defaults(parse_game_kind(g.game));
  if (g.seed) cfg.train.seed = *g.seed;
  return cfg;
}

// Whole game from the initial PBS: every legal action in the small games,
// the base abstraction in nl-leduc.
SubgameTree whole_game(const GameConfig& game) {
  const auto root = initial_pbs(game);
  if (game.kind == GameKind::kNlLeduc) {
    return build_subgame(root, base_abstraction(root.state), base_nonroot_policy(), DepthRule{0});
  }
  return build_subgame(root, legal_actions(root.state), full_legal_policy(), DepthRule{0});
}

int run_solve(const Globals& g, int iters, bool to_file) {
  auto cfg = resolve(g);
  if (iters > 0) cfg.train.solver.iterations = iters;
  const auto& game = cfg.train.game;
  const auto tree = whole_game(game);
  const auto result = solve(tree, cfg.train.solver);
  std::printf("game %s stack %d ante %d iterations %d\n", game_kind_name(game.kind).c_str(), game.stack, game.ante,
              cfg.train.solver.iterations);
  for (int p = 0; p < kNumPlayers; ++p) {
    std::printf("P%d root value %.6f\n", p + 1, belief_value(tree, p, result.root_values[p]));
  }
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int h = 0; h < tree.num_hands; ++h) {
      if (tree.hand_live(p, h, 0)) {
        std::printf("P%d %s value %.6f\n", p + 1, card_name(game.kind, h).c_str(), result.root_values[p][h]);
      }
    }
  }
  const auto [e0, e1] = exploitability(tree, result.average);
  std::printf("exploitability %.9f\n", (e0 + e1) / game.ante);
  if (to_file) {
    std::filesystem::create_directories(g.out);
    const auto path = (std::filesystem::path(g.out) / "strategy.tsv").string();
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
    write_profile(out, result.average);
    std::printf("strategy written to %s\n", path.c_str());
  } else {
    write_profile(std::cout, result.average);
  }
  return 0;
}

int run_train(const Globals& g, bool resume) {
  const auto cfg = resolve(g);
  const auto a = run_training(cfg.train, g.out, resume, [](const std::string& line) {
    std::fprintf(stderr, "%s\n", line.c_str());
  });
  std::printf("epochs %d\nvalue %s\nactor %s\ncritic %s\n", a.epochs_done, a.value_checkpoint.c_str(),
              a.actor_checkpoint.c_str(), a.critic_checkpoint.c_str());
  return 0;
}

Agent make(const ExperimentConfig& cfg, AgentKind kind, const AgentResources& res) {
  AgentSpec spec;
  spec.kind = kind;
  spec.params = cfg.train.solver;
  spec.gate = cfg.eval.gate;
  return Agent(spec, res);
}

AgentResources resources(const ExperimentConfig& cfg) {
  return load_resources(cfg.train, cfg.eval.run_dir);
}

int run_eval(const Globals& g, const std::string& a_name, const std::string& b_name, std::optional<int64_t> hands,
             const std::string& run_dir) {
  auto cfg = resolve(g);
  if (!a_name.empty()) cfg.eval.agent_a = parse_agent_kind(a_name);
  if (!b_name.empty()) cfg.eval.agent_b = parse_agent_kind(b_name);
  if (hands) cfg.eval.hands = *hands;
  if (!run_dir.empty()) cfg.eval.run_dir = run_dir;
  if (cfg.eval.hands <= 0) {
    std::fprintf(stderr, "warning: no hands requested, empty result\n");
    std::printf("hands 0\n");
    return 0;
  }
  const auto res = resources(cfg);
  Agent a = make(cfg, cfg.eval.agent_a, res);
  Agent b = make(cfg, cfg.eval.agent_b, res);
  std::ofstream ledger;
  MatchOptions opts;
  if (!cfg.eval.ledger.empty()) {
    ledger.open(cfg.eval.ledger, std::ios::app);
    if (!ledger) throw Error(ErrorCode::kIo, "cannot append to " + cfg.eval.ledger);
    opts.ledger = &ledger;
  }
  const auto r = play_match(a, b, cfg.train.game, cfg.eval.hands, cfg.train.seed, opts);
  std::printf("%s vs %s: %lld hands, %.3f +- %.3f mA/hand\n", agent_kind_name(cfg.eval.agent_a).c_str(),
              agent_kind_name(cfg.eval.agent_b).c_str(), static_cast<long long>(r.n_hands), r.win_rate, r.se);
  return 0;
}

int run_exploit(const Globals& g, const std::string& agent_name, std::optional<int> states, const std::string& run_dir) {
  auto cfg = resolve(g);
  if (!agent_name.empty()) cfg.eval.agent_a = parse_agent_kind(agent_name);
  if (states) cfg.eval.exploit_states = *states;
  if (!run_dir.empty()) cfg.eval.run_dir = run_dir;
  const auto res = resources(cfg);
  const Agent agent = make(cfg, cfg.eval.agent_a, res);
  const auto r = evaluate_exploitability(agent, cfg.train.game, cfg.eval.exploit_states, cfg.train.seed);
  std::printf("%s: %zu states, exploitability %.6f +- %.6f antes\n", agent_kind_name(cfg.eval.agent_a).c_str(),
              r.per_state.size(), r.mean, r.se);
  return 0;
}

int run_bench(const Globals& g, int iters) {
  auto cfg = resolve(g);
  if (iters > 0) cfg.train.solver.iterations = iters;
  const auto tree = whole_game(cfg.train.game);
  DcfrSolver solver(tree, cfg.train.solver);
  const auto t0 = std::chrono::steady_clock::now();
  solver.run();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("nodes %zu iterations %d seconds %.4f iterations/sec %.1f nodes touched %lld\n", tree.nodes.size(),
              solver.iteration(), secs, solver.iteration() / secs, static_cast<long long>(solver.nodes_touched()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlcfr: subgame solving and learned action abstractions for small poker games"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "experiment config (INI)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--game", g.game, "game")->check(CLI::IsMember({"toy", "kuhn", "nl-leduc"}));

  int iters = 0;
  bool to_file = false;
  auto* solve_cmd = app.add_subcommand("solve", "solve the whole game and print values and the strategy");
  solve_cmd->add_option("--iters", iters, "DCFR iterations");
  solve_cmd->add_flag("--write", to_file, "write the strategy to OUT/strategy.tsv instead of stdout");

  bool resume = false;
  auto* train_cmd = app.add_subcommand("train", "run the staged training pipeline into OUT");
  train_cmd->add_flag("--resume", resume, "continue from the newest checkpoint in OUT");

  std::string agent_a, agent_b, run_dir;
  std::optional<int64_t> hands;
  auto* eval_cmd = app.add_subcommand("eval", "play a mirrored match between two agents");
  eval_cmd->add_option("--agent-a", agent_a, "first agent");
  eval_cmd->add_option("--agent-b", agent_b, "second agent");
  eval_cmd->add_option("--hands", hands, "number of hands");
  eval_cmd->add_option("--run-dir", run_dir, "training output with network checkpoints");

  std::string agent;
  std::optional<int> states;
  auto* exploit_cmd = app.add_subcommand("exploit", "exploitability on sampled round-two states");
  exploit_cmd->add_option("--agent", agent, "agent");
  exploit_cmd->add_option("--states", states, "number of states");
  exploit_cmd->add_option("--run-dir", run_dir, "training output with network checkpoints");

  auto* bench_cmd = app.add_subcommand("bench", "solver throughput on the whole game");
  bench_cmd->add_option("--iters", iters, "DCFR iterations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    if (*solve_cmd) return run_solve(g, iters, to_file);
    if (*train_cmd) return run_train(g, resume);
    if (*eval_cmd) return run_eval(g, agent_a, agent_b, hands, run_dir);
    if (*exploit_cmd) return run_exploit(g, agent, states, run_dir);
    if (*bench_cmd) return run_bench(g, iters);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
