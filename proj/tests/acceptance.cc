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

// Acceptance run: one [PASS]/[FAIL] line per criterion.
// Usage: rlcfr_acceptance <source dir> <run dir> <cli path>

#include <sys/wait.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/fd.h"
#include "oracles/history.h"
#include "oracles/lp.h"
#include "rlcfr/config.h"
#include "rlcfr/eval.h"
#include "rlcfr/logs.h"

namespace rlcfr {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

double mean_of(const std::vector<double>& xs, double* se = nullptr) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  if (se) {
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    *se = xs.size() > 1 ? std::sqrt(v / (xs.size() - 1) / xs.size()) : 0.0;
  }
  return m;
}

// ---------------------------------------------------------------- 1, 2, 3

void toy_game() {
  const auto t0 = Clock::now();
  const auto tree = build_full_tree(GameConfig::toy());
  DcfrParams p;
  p.iterations = 1000;
  const auto r = solve(tree, p);
  const double secs = seconds_since(t0);
  const auto j = infostate_key(apply(GameState::initial(GameConfig::toy()), GameAction::chance(0)), 0);
  const auto q = infostate_key(apply(apply(GameState::initial(GameConfig::toy()), GameAction::chance(0)),
                                     GameAction::all_in()), 1);
  const double v2 = belief_value(tree, 1, r.root_values[1]);
  const double j_all_in = r.average.at(j)[1];
  const double call = r.average.at(q)[1];
  const double k_value = r.root_values[0][2];
  const double j_value = r.root_values[0][0];
  const bool ok = std::abs(v2 + 0.5) <= 0.01 && std::abs(j_all_in - 0.5) <= 0.02 && std::abs(call - 0.5) <= 0.02 &&
                  std::abs(k_value - 2.0) <= 0.02 && std::abs(j_value + 1.0) <= 0.02 && secs < 1.0;
  report(1, "toy game, DCFR T=1000", ok,
         fmt("P2 value %.5f (-0.5+-0.01), J all-in %.5f, P2 call %.5f (0.5+-0.02), K %.5f (2+-0.02), "
             "J %.5f (-1+-0.02), %.3fs (<1s)",
             v2, j_all_in, call, k_value, j_value, secs));
}

void kuhn() {
  const auto cfg = GameConfig::kuhn();
  const auto t0 = Clock::now();
  const auto tree = build_full_tree(cfg);
  DcfrParams p;
  p.iterations = 10000;
  const auto r = solve(tree, p);
  const double secs = seconds_since(t0);
  const double lp = oracle::sequence_form_value(cfg);
  const double v = oracle::expected_value(GameState::initial(cfg), r.average);
  const auto [e0, e1] = exploitability(tree, r.average);
  const bool ok = std::abs(v - lp) <= 0.002 && e0 + e1 < 0.005 && secs < 10.0;
  report(2, "Kuhn, DCFR T=10000", ok,
         fmt("value %.6f vs LP %.6f (|d|<=0.002), exploitability %.2e (<0.005), %.2fs (<10s)", v, lp, e0 + e1,
             secs));
}

void convergence() {
  bool ok = true;
  std::string detail;
  for (const auto& cfg : {GameConfig::kuhn(), GameConfig::nl_leduc(10)}) {
    const auto tree = build_full_tree(cfg);
    std::vector<double> e;
    for (int t : {100, 400, 1600}) {
      DcfrParams p;
      p.iterations = t;
      const auto [a, b] = exploitability(tree, solve(tree, p).average);
      e.push_back((a + b) / cfg.ante);
    }
    const double ratio = e[2] / e[1];
    ok = ok && e[2] < e[1] && e[1] < e[0] && ratio <= 0.7;
    detail += fmt("%s%s: %.2e > %.2e > %.2e, ratio %.3f (<=0.7)", detail.empty() ? "" : "; ",
                  game_kind_name(cfg.kind).c_str(), e[0], e[1], e[2], ratio);
  }
  report(3, "exploitability falls with T", ok, detail);
}

// ---------------------------------------------------------------- helpers

struct Run {
  ExperimentConfig cfg;
  std::string dir;
  AgentResources res;
  PbsValueFn value_fn;
};

Beliefs random_beliefs(int n, int board, Rng& rng) {
  std::gamma_distribution<double> g(1.0);
  const double mix = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  Beliefs b;
  for (auto& v : b) {
    v.assign(n, 0.0);
    std::vector<double> z(n);
    double zs = 0.0;
    for (int h = 0; h < n; ++h) {
      if (h == board) continue;
      zs += z[h] = g(rng);
    }
    double total = 0.0;
    for (int h = 0; h < n; ++h) {
      if (h == board) continue;
      total += v[h] = (1.0 - mix) + mix * n * z[h] / zs;
    }
    for (double& x : v) x /= total;
  }
  return b;
}

// Decision PBS a few base-abstraction actions deep, either round.
PublicBeliefState random_decision_pbs(const GameConfig& game, Rng& rng) {
  while (true) {
    PublicState s = initial_public_state(game);
    const int steps = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int i = 0; i < steps || s.is_chance(); ++i) {
      if (s.is_chance()) {
        std::vector<int> open;
        for (int c = 0; c < num_cards(game.kind); ++c) {
          if (is_legal(s, GameAction::chance(c))) open.push_back(c);
        }
        s = apply(s, GameAction::chance(open[std::uniform_int_distribution<size_t>(0, open.size() - 1)(rng)]));
        continue;
      }
      if (!s.is_decision()) break;
      auto acts = base_abstraction(s);
      std::erase_if(acts, [](const GameAction& a) { return a.kind == ActionKind::kFold || a.kind == ActionKind::kAllIn; });
      if (acts.empty()) break;
      s = apply(s, acts[std::uniform_int_distribution<size_t>(0, acts.size() - 1)(rng)]);
    }
    if (!s.is_decision()) continue;
    return {s, random_beliefs(num_cards(game.kind), s.board, rng)};
  }
}

RebelConfig solve_config(const Run& run) {
  return rebel_config(run.cfg.train, run.value_fn, run.res.actor);
}

// ---------------------------------------------------------------- 4

void rebel_consistency(const Run& run) {
  const auto& train = run.cfg.train;
  const auto data = read_pbs_log((fs::path(run.dir) / "pbs_1.log").string());
  const double huber = mean_huber(data, *run.res.value_net, train.huber_delta);
  const auto t0 = Clock::now();
  Rng rng(4001);
  std::gamma_distribution<double> g(1.0);
  const auto root0 = initial_pbs(train.game);
  std::vector<double> err;
  RebelConfig net_cfg;
  net_cfg.params = train.solver;
  net_cfg.value_fn = run.value_fn;
  net_cfg.depth = DepthRule{1};
  RebelConfig exact_cfg;
  exact_cfg.params = train.solver;
  exact_cfg.params.iterations = 1000;
  exact_cfg.depth = DepthRule{0};
  for (int i = 0; i < 100; ++i) {
    PublicBeliefState root = root0;
    root.beliefs = random_beliefs(num_cards(train.game.kind), -1, rng);
    const auto abs = base_abstraction(root.state);
    const double a = rebel_solve(root, abs, net_cfg, ExploreParams{}, nullptr).root_value;
    const double b = rebel_solve(root, abs, exact_cfg, ExploreParams{}, nullptr).root_value;
    err.push_back(std::abs(a - b) / train.game.ante);
  }
  const double eval_secs = seconds_since(t0);
  const double train_secs = read_manifest(run.dir).value_wall_ms / 1000.0;
  const double mae = mean_of(err);
  const bool ok = huber < 0.05 && mae <= 0.1 && train_secs + eval_secs < 1800.0;
  report(4, "depth-limited solves match full solves", ok,
         fmt("value-net Huber %.4f (<0.05), root MAE %.4f antes over 100 PBSs (<=0.1), %.0fs training + %.0fs "
             "solving (<1800s)",
             huber, mae, train_secs, eval_secs));
}

// ---------------------------------------------------------------- 5

ActionVector base_vector() { return {-0.8, 0.0, -0.6, 0.0, -0.2, 0.0}; }

void reward_correctness(const Run& run) {
  const auto rc = solve_config(run);
  const auto& game = run.cfg.train.game;
  const double range = run.cfg.train.bet_range;
  Rng rng(5001);
  int zero_checked = 0, zero_bad = 0;
  while (zero_checked < 200) {
    const auto pbs = random_decision_pbs(game, rng);
    if (decode_abstraction(pbs, base_vector(), range) != base_abstraction(pbs.state)) continue;
    ++zero_checked;
    if (reward(pbs, base_vector(), rc, range).r != 0.0) ++zero_bad;
  }
  int anti_bad = 0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto pbs = random_decision_pbs(game, rng);
    ActionVector a(2 * run.cfg.train.k);
    for (double& x : a) x = u(rng);
    const auto abs = decode_abstraction(pbs, a, range);
    const auto base = base_abstraction(pbs.state);
    if (abstraction_gap(pbs, abs, base, rc) != -abstraction_gap(pbs, base, abs, rc)) ++anti_bad;
  }
  double worst = -1e300;
  std::vector<double> gains;
  int subsets = 0;
  while (subsets < 50) {
    const auto pbs = random_decision_pbs(game, rng);
    const auto base = base_abstraction(pbs.state);
    const auto keep = always_set(pbs.state);
    ActionAbstraction sub;
    for (const auto& a : base) {
      const bool forced = std::find(keep.begin(), keep.end(), a) != keep.end();
      if (forced || std::uniform_int_distribution<int>(0, 1)(rng)) sub.push_back(a);
    }
    if (sub == base) continue;
    ++subsets;
    gains.push_back(abstraction_gap(pbs, sub, base, rc));
    worst = std::max(worst, gains.back());
  }
  const auto above = std::count_if(gains.begin(), gains.end(), [](double g) { return g > 1e-6; });
  const bool ok = zero_bad == 0 && anti_bad == 0 && worst <= 1e-6;
  report(5, "reward correctness", ok,
         fmt("base-decoding nonzero rewards %d/%d, antisymmetry breaks %d/200, max subset reward %.3e antes "
             "over 50 (<=1e-6; %ld above, mean %.3e)",
             zero_bad, zero_checked, anti_bad, worst, static_cast<long>(above), mean_of(gains)));
}

// ---------------------------------------------------------------- 6

void gradients(const Run& run) {
  const auto& train = run.cfg.train;
  Rng rng(6001);
  Mlp actor = *run.res.actor;
  Mlp critic = *run.res.critic;
  Mlp value = *run.res.value_net;
  const auto rl = read_rl_log((fs::path(run.dir) / "rl.log").string());
  std::vector<TransitionSample> batch;
  std::vector<StateFeatures> states;
  for (int i = 0; i < 32 && !rl.empty(); ++i) {
    batch.push_back(rl[std::uniform_int_distribution<size_t>(0, rl.size() - 1)(rng)]);
    states.push_back(batch.back().s);
  }
  const Gradients gc = critic_gradient(critic, batch, nullptr);
  const double ec = oracle::fd_max_rel_error(
      critic, gc,
      [&] {
        double t = 0.0;
        for (const auto& s : batch) {
          const double d = critic_estimate(critic, s.s, s.a) - s.r;
          t += d * d;
        }
        return t / batch.size();
      },
      20, rng);
  const Gradients ga = actor_gradient(actor, critic, states, nullptr);
  const double ea = oracle::fd_max_rel_error(
      actor, ga,
      [&] {
        double t = 0.0;
        for (const auto& s : states) t -= critic_estimate(critic, s, actor.forward(s));
        return t / states.size();
      },
      20, rng);
  const auto pbs_data = read_pbs_log((fs::path(run.dir) / "pbs_1.log").string());
  std::vector<PbsSample> vb;
  for (int i = 0; i < 32; ++i) vb.push_back(pbs_data[std::uniform_int_distribution<size_t>(0, pbs_data.size() - 1)(rng)]);
  std::vector<const PbsSample*> rows;
  for (const auto& s : vb) rows.push_back(&s);
  const Gradients gv = value_gradient(value, rows, train.huber_delta, nullptr);
  const double ev = oracle::fd_max_rel_error(value, gv, [&] { return mean_huber(vb, value, train.huber_delta); }, 20, rng);
  const bool ok = !batch.empty() && ea <= 1e-4 && ec <= 1e-4 && ev <= 1e-4;
  report(6, "finite-difference gradient checks", ok,
         fmt("max relative error actor %.2e, critic %.2e, value %.2e over 20 probes each (<=1e-4)", ea, ec, ev));
}

// ---------------------------------------------------------------- 7

void end_to_end(const Run& run) {
  const auto& train = run.cfg.train;
  const int epochs = read_manifest(run.dir).epochs_done;
  const auto rc = solve_config(run);
  ExploreParams explore = train.explore;
  explore.noise_sigma = 0.0;
  std::vector<double> gated, ungated;
  int fallbacks = 0;
  for (uint64_t e = 0; gated.size() < 1000; ++e) {
    Rng rng = derive_rng(train.seed + 7919, 7, e);
    for (const auto& t : sample_epoch(*run.res.actor, rc, explore, train, rng)) {
      if (gated.size() >= 1000) break;
      const bool fallback = critic_estimate(*run.res.critic, t.s, t.a) < 0.0;
      fallbacks += fallback;
      ungated.push_back(t.r);
      gated.push_back(fallback ? 0.0 : t.r);
    }
  }
  double gse = 0.0, use = 0.0;
  const double gm = mean_of(gated, &gse);
  const double um = mean_of(ungated, &use);
  const bool ok_a = epochs >= 20000 && gm >= 0.0 && um + use >= 0.0;
  report(7, "(a) held-out rewards", ok_a,
         fmt("%d epochs (>=20000); gated mean %.5f +- %.5f (>=0), ungated %.5f +- %.5f (>=0 within 1 SE), "
             "gate fell back on %d/1000",
             epochs, gm, gse, um, use, fallbacks));

  const int64_t hands = std::max<int64_t>(100000, run.cfg.eval.hands);
  AgentSpec a_spec;
  a_spec.kind = AgentKind::kRlcfr;
  a_spec.params = train.solver;
  AgentSpec b_spec = a_spec;
  b_spec.kind = AgentKind::kBaseFixed;
  Agent a(a_spec, run.res), b(b_spec, run.res);
  const auto t0 = Clock::now();
  const auto m = play_match(a, b, train.game, hands, train.seed + 31);
  const bool ok_b = m.n_hands >= 100000 && m.win_rate + 2.0 * m.se >= 0.0 && m.win_rate > 0.0;
  report(7, "(b) RL-CFR vs BASE_FIXED", ok_b,
         fmt("%lld mirrored hands, %.3f +- %.3f mA/hand (>=0 within 2 SE, positive point estimate), %.0fs",
             static_cast<long long>(m.n_hands), m.win_rate, m.se, seconds_since(t0)));
}

// ---------------------------------------------------------------- 8

void mul_action(const Run& run) {
  const auto& train = run.cfg.train;
  RebelConfig rc;
  rc.params = train.solver;
  rc.value_fn = run.value_fn;
  AgentSpec spec{AgentKind::kRlcfr, train.solver};
  const Agent rl(spec, run.res);
  Rng rng(8001);
  int dominated = 0;
  std::vector<double> mul_v, rl_v;
  for (int i = 0; i < 100; ++i) {
    const auto pbs = random_decision_pbs(train.game, rng);
    const auto c = mul_action_select(pbs, mul_action_candidates(pbs.state), rc);
    for (double v : c.values) dominated += v > c.values[c.index];
    mul_v.push_back(c.values[c.index] / train.game.ante);
    rl_v.push_back(rebel_solve(pbs, rl.root_abstraction(pbs), rc, ExploreParams{}, nullptr).root_value /
                   train.game.ante);
  }
  const double mm = mean_of(mul_v), rm = mean_of(rl_v);
  const bool ok = dominated == 0 && rm >= mm - 0.01;
  report(8, "MUL-ACTION comparison", ok,
         fmt("selected beaten by a rejected candidate %d times (0), RL-CFR mean root value %.5f vs MUL-ACTION "
             "%.5f antes (>= minus 0.01)",
             dominated, rm, mm));
}

// ---------------------------------------------------------------- 9

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Drops wall-clock fields: the last metrics.tsv column, *_wall_ms manifest keys.
std::string without_wall(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, out;
  const bool tsv = p.extension() == ".tsv";
  while (std::getline(in, line)) {
    if (tsv) {
      out += line.substr(0, line.rfind('\t')) + '\n';
    } else if (line.find("wall_ms=") == std::string::npos) {
      out += line + '\n';
    }
  }
  return out;
}

void determinism(const std::string& source, const std::string& cli) {
  const auto tmp = fs::temp_directory_path() / "rlcfr_acceptance_det";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const std::string cfg = (fs::path(source) / "configs" / "acceptance.ini").string();
  const std::string tiny = (fs::path(source) / "configs" / "tiny.ini").string();
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 2; ++i) {
    ok &= shell(cli + " --config " + cfg + " --seed 3 solve --iters 100 > " + (tmp / ("solve" + std::to_string(i))).string()) == 0;
    ok &= shell(cli + " --config " + tiny + " --out " + (tmp / ("train" + std::to_string(i))).string() +
                " train > /dev/null 2>&1") == 0;
  }
  const bool solve_same = slurp(tmp / "solve0") == slurp(tmp / "solve1") && !slurp(tmp / "solve0").empty();
  int files = 0, differ = 0;
  for (const auto& entry : fs::directory_iterator(tmp / "train0")) {
    const auto name = entry.path().filename();
    const auto other = tmp / "train1" / name;
    ++files;
    const bool text = name == "metrics.tsv" || name == "manifest.txt";
    const bool same = text ? without_wall(entry.path()) == without_wall(other) : slurp(entry.path()) == slurp(other);
    if (!same) {
      ++differ;
      detail += " " + name.string();
    }
  }
  ok = ok && solve_same && differ == 0 && files > 0;
  report(9, "determinism", ok,
         fmt("solve output %s; train: %d/%d files identical (wall-clock fields ignored)%s",
             solve_same ? "identical" : "differs", files - differ, files, detail.c_str()));
}

}  // namespace
}  // namespace rlcfr

int main(int argc, char** argv) {
  using namespace rlcfr;
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <source dir> <run dir> <cli path>\n", argv[0]);
    return 2;
  }
  const std::string source = argv[1], run_dir = argv[2], cli = argv[3];
  const auto t0 = Clock::now();

  toy_game();
  kuhn();
  convergence();

  Run run;
  run.cfg = load_config((fs::path(source) / "configs" / "acceptance.ini").string());
  run.dir = run_dir;
  const auto manifest = read_manifest(run_dir);
  if (manifest.epochs_done < run.cfg.train.epochs || manifest.value_checkpoint.empty()) {
    note("training into " + run_dir + " (resuming where possible)");
    run_training(run.cfg.train, run_dir, true, [](const std::string& line) { note(line); });
  }
  run.res = load_resources(run.cfg.train, run_dir);
  run.value_fn = net_value_fn(run.res.value_net);

  rebel_consistency(run);
  reward_correctness(run);
  gradients(run);
  end_to_end(run);
  mul_action(run);
  determinism(source, cli);

  std::printf("%s: %d failing, %.0fs\n", failures ? "FAILED" : "ALL PASSED", failures, seconds_since(t0));
  return failures ? 1 : 0;
}
