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

#include "rlcfr/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rlcfr/logs.h"

namespace rlcfr {

namespace fs = std::filesystem;

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int draw_index(const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) return -1;
  double u = uniform01(rng) * total;
  int last = -1;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = static_cast<int>(i);
    if (u < weights[i]) return last;
    u -= weights[i];
  }
  return last;
}

std::vector<int> layers(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

std::vector<double> random_beliefs(int n, double alpha, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> b(n);
  for (;;) {
    for (double& x : b) x = uniform01(rng) < 0.25 ? 0.0 : gamma(rng);
    const double total = std::accumulate(b.begin(), b.end(), 0.0);
    if (total > 0.0) {
      for (double& x : b) x /= total;
      return b;
    }
  }
}

// Board reveal after both players put in `contrib` chips in round one.
PublicState pre_board_state(const GameConfig& game, int contrib) {
  PublicState s = initial_public_state(game);
  const int c = contrib / game.ante;
  if (c <= 1) {
    s = apply(s, GameAction::check_call());
  } else if (c * game.ante >= game.stack) {
    s = apply(s, GameAction::all_in());
  } else {
    s = apply(s, GameAction::bet((c - 1) * game.ante));
  }
  return apply(s, GameAction::check_call());
}

bool has_mass(const Beliefs& b, int board) {
  double m = 0.0;
  for (double x : joint_weights(b, board)) m += x;
  return m > 0.0;
}

// Leaf PBSs from a full-depth solve stopped at a random iteration.
std::vector<PublicBeliefState> reach_samples(const TrainConfig& cfg, int count, Rng& rng,
                                             const AbstractionPolicy& nonroot) {
  const auto& game = cfg.game;
  const int n = num_cards(game.kind);
  PublicBeliefState root = initial_pbs(game);
  const double mix = uniform01(rng);
  for (auto& b : root.beliefs) {
    const auto noise = random_beliefs(n, cfg.value_data.dirichlet_alpha, rng);
    for (int h = 0; h < n; ++h) b[h] = (1.0 - mix) * b[h] + mix * noise[h];
  }
  ActionAbstraction abs;
  if (uniform01(rng) < 0.5) {
    abs = base_abstraction(root.state);
  } else {
    ActionVector a(2 * cfg.k);
    for (double& x : a) x = 2.0 * uniform01(rng) - 1.0;
    abs = decode_abstraction(root.state, a, cfg.bet_range);
  }
  const SubgameTree tree = build_subgame(root, abs, nonroot, DepthRule{0});
  DcfrParams params = cfg.solver;
  params.iterations = std::uniform_int_distribution<int>(1, cfg.solver.iterations)(rng);
  DcfrSolver solver(tree, params);
  solver.run();
  const auto reach = solver.current_reach();
  std::vector<int> nodes;
  std::vector<double> weights;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.kind != NodeKind::kChance || node.state.round != 1) continue;
    nodes.push_back(i);
    double w = 0.0;
    for (double x : joint_weights(reach[i], -1)) w += x;
    weights.push_back(w);
  }
  std::vector<PublicBeliefState> out;
  for (int k = 0; k < count && !nodes.empty(); ++k) {
    int pick = uniform01(rng) < cfg.explore.epsilon
                   ? std::uniform_int_distribution<int>(0, nodes.size() - 1)(rng)
                   : draw_index(weights, rng);
    if (pick < 0) pick = std::uniform_int_distribution<int>(0, nodes.size() - 1)(rng);
    auto pbs = leaf_pbs(tree, nodes[pick], reach[nodes[pick]]);
    if (uniform01(rng) < 0.5) pbs = perturb_pbs(pbs, rng);
    if (has_mass(pbs.beliefs, -1)) out.push_back(std::move(pbs));
  }
  return out;
}

PublicBeliefState synthetic_sample(const TrainConfig& cfg, Rng& rng) {
  const auto& game = cfg.game;
  const int n = num_cards(game.kind);
  for (;;) {
    const int chips = std::uniform_int_distribution<int>(1, game.stack / game.ante)(rng) * game.ante;
    PublicBeliefState pbs{pre_board_state(game, chips), {}};
    for (auto& b : pbs.beliefs) b = random_beliefs(n, cfg.value_data.dirichlet_alpha, rng);
    if (has_mass(pbs.beliefs, -1)) return pbs;
  }
}

}  // namespace

int value_input_size(GameKind kind) { return 3 + 4 * num_cards(kind); }
int value_output_size(GameKind kind) { return 2 * num_cards(kind); }

NetworkSpec value_net_spec(const TrainConfig& cfg) {
  return {layers(value_input_size(cfg.game.kind), cfg.value_hidden, value_output_size(cfg.game.kind)),
          OutputActivation::kIdentity};
}

NetworkSpec actor_spec(const TrainConfig& cfg) {
  return {layers(feature_size(cfg.game.kind), cfg.actor_hidden, 2 * cfg.k), OutputActivation::kTanh};
}

NetworkSpec critic_spec(const TrainConfig& cfg) {
  return {layers(feature_size(cfg.game.kind) + 2 * cfg.k, cfg.critic_hidden, 1), OutputActivation::kIdentity};
}

double value_scale(const PublicBeliefState& pbs) {
  return 0.5 * pbs.state.pot() / pbs.state.config.ante;
}

Beliefs showdown_equity(const PublicBeliefState& pbs) {
  const auto& s = pbs.state;
  if (s.phase != Phase::kBoard) throw Error(ErrorCode::kInvalidArgument, "showdown equity needs a pending board");
  const int n = num_cards(s.config.kind);
  Beliefs out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<double> mass[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int c = 0; c < n; ++c) {
    PublicState end = apply(s, GameAction::chance(c));
    while (!end.is_terminal()) end = apply(end, GameAction::check_call());
    for (int p = 0; p < kNumPlayers; ++p) {
      for (int h = 0; h < n; ++h) {
        for (int o = 0; o < n; ++o) {
          if (h == o || h == c || o == c) continue;
          const double w = pbs.beliefs[1 - p][o];
          out[p][h] += w * terminal_utility(end, p, h, o);
          mass[p][h] += w;
        }
      }
    }
  }
  const double half_pot = 0.5 * s.pot();
  for (int p = 0; p < kNumPlayers; ++p) {
    for (int h = 0; h < n; ++h) out[p][h] = mass[p][h] > 0.0 ? out[p][h] / (mass[p][h] * half_pot) : 0.0;
  }
  return out;
}

std::vector<double> value_features(const PublicBeliefState& pbs) {
  const auto& s = pbs.state;
  const double total = s.total_chips();
  std::vector<double> x{s.pot() / total, s.stacks[0] / total, s.stacks[1] / total};
  for (const auto& b : pbs.beliefs) x.insert(x.end(), b.begin(), b.end());
  for (const auto& e : showdown_equity(pbs)) x.insert(x.end(), e.begin(), e.end());
  return x;
}

PbsValueFn net_value_fn(std::shared_ptr<const Mlp> net) {
  return [net = std::move(net)](const std::vector<PublicBeliefState>& batch) {
    std::vector<ValueVector> out;
    if (batch.empty()) return out;
    const int in = net->spec().input_size();
    Eigen::MatrixXd x(in, batch.size());
    for (size_t j = 0; j < batch.size(); ++j) {
      const auto f = value_features(batch[j]);
      if (static_cast<int>(f.size()) != in) throw Error(ErrorCode::kDimMismatch, "value features");
      x.col(j) = Eigen::Map<const Eigen::VectorXd>(f.data(), in);
    }
    const Eigen::MatrixXd y = net->forward(x);
    const int n = static_cast<int>(y.rows()) / 2;
    for (size_t j = 0; j < batch.size(); ++j) {
      const double chips = value_scale(batch[j]) * batch[j].state.config.ante;
      ValueVector v;
      for (int p = 0; p < kNumPlayers; ++p) {
        v[p].resize(n);
        for (int h = 0; h < n; ++h) v[p][h] = y(p * n + h, j) * chips;
      }
      out.push_back(zero_sum_adjust(v, batch[j]));
    }
    return out;
  };
}

std::vector<PbsSample> generate_value_data(const TrainConfig& cfg, int count, Rng& rng,
                                           const AbstractionPolicy& nonroot) {
  std::vector<PublicBeliefState> states;
  while (static_cast<int>(states.size()) < count) {
    if (uniform01(rng) < cfg.value_data.synthetic_fraction) {
      states.push_back(synthetic_sample(cfg, rng));
    } else {
      const int want = std::min(cfg.value_data.leaves_per_solve, count - static_cast<int>(states.size()));
      for (auto& s : reach_samples(cfg, want, rng, nonroot)) states.push_back(std::move(s));
    }
  }
  DcfrParams label = cfg.solver;
  label.iterations = cfg.value_data.label_iterations;
  std::vector<PbsSample> out;
  out.reserve(states.size());
  for (auto& s : states) {
    auto values = exact_values(s, label, nonroot);
    out.push_back({std::move(s), std::move(values)});
  }
  return out;
}

namespace {

// Targets in antes; `scale` maps raw network outputs to antes.
void value_batch(const std::vector<const PbsSample*>& batch, int in, int out, Eigen::MatrixXd& x,
                 Eigen::MatrixXd& y, Eigen::RowVectorXd& scale) {
  x.resize(in, batch.size());
  y.resize(out, batch.size());
  scale.resize(batch.size());
  const int n = out / 2;
  for (size_t j = 0; j < batch.size(); ++j) {
    const auto f = value_features(batch[j]->pbs);
    x.col(j) = Eigen::Map<const Eigen::VectorXd>(f.data(), in);
    const double ante = batch[j]->pbs.state.config.ante;
    scale(j) = value_scale(batch[j]->pbs);
    for (int p = 0; p < kNumPlayers; ++p) {
      for (int h = 0; h < n; ++h) y(p * n + h, j) = batch[j]->values[p][h] / ante;
    }
  }
}

}  // namespace

Gradients value_gradient(const Mlp& net, const std::vector<const PbsSample*>& batch, double huber_delta,
                         double* loss) {
  const int in = net.spec().input_size();
  const int out = net.spec().output_size();
  const int n = batch.size();
  Eigen::MatrixXd x, y;
  Eigen::RowVectorXd scale;
  value_batch(batch, in, out, x, y, scale);
  const Eigen::MatrixXd raw = net.forward(x);
  Eigen::MatrixXd up(out, n);
  const double norm = 1.0 / (static_cast<double>(out) * n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < out; ++i) {
      const auto [l, g] = huber_loss(raw(i, j) * scale(j), y(i, j), huber_delta);
      total += l;
      up(i, j) = g * scale(j) * norm;
    }
  }
  if (loss) *loss = total * norm;
  return net.backward(x, up);
}

ValueTrainTrace train_value_net(const ReplayBuffer<PbsSample>& data, Mlp& net, AdamState& opt, int steps,
                                int batch, double huber_delta, Rng& rng) {
  ValueTrainTrace trace;
  std::vector<const PbsSample*> rows(batch);
  for (int step = 0; step < steps; ++step) {
    for (auto& r : rows) r = &data.sample(rng);
    double loss = 0.0;
    const Gradients g = value_gradient(net, rows, huber_delta, &loss);
    trace.loss.push_back(loss);
    try {
      adam_step(net, g, opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNonfiniteGrad) {
        throw Error(ErrorCode::kNonfiniteGrad, "value batch " + std::to_string(step));
      }
      throw;
    }
  }
  return trace;
}

double mean_huber(const std::vector<PbsSample>& data, const Mlp& net, double huber_delta) {
  if (data.empty()) return 0.0;
  std::vector<const PbsSample*> rows;
  for (const auto& s : data) rows.push_back(&s);
  Eigen::MatrixXd x, y;
  Eigen::RowVectorXd scale;
  value_batch(rows, net.spec().input_size(), net.spec().output_size(), x, y, scale);
  const Eigen::MatrixXd raw = net.forward(x);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    for (Eigen::Index i = 0; i < raw.rows(); ++i) loss += huber_loss(raw(i, j) * scale(j), y(i, j), huber_delta).first;
  }
  return loss / raw.size();
}

ActionVector actor_action(const Mlp& actor, const StateFeatures& s) {
  auto a = actor.forward(s);
  for (double& x : a) x = std::clamp(x, -1.0, 1.0);
  return a;
}

AbstractionPolicy learned_nonroot_policy(std::shared_ptr<const Mlp> actor, double bet_range) {
  return layered_policy([actor = std::move(actor), bet_range](const PublicState& s, int) {
    return decode_abstraction(s, actor_action(*actor, encode_state(s)), bet_range);
  });
}

RebelConfig rebel_config(const TrainConfig& cfg, PbsValueFn value_fn, std::shared_ptr<const Mlp> actor) {
  RebelConfig out;
  out.params = cfg.solver;
  out.value_fn = std::move(value_fn);
  out.depth = DepthRule{1};
  if (cfg.stage == TrainStage::kLearnedNonroot && actor) out.nonroot = learned_nonroot_policy(actor, cfg.bet_range);
  return out;
}

std::vector<TransitionSample> sample_epoch(const Mlp& actor, const RebelConfig& solve_cfg,
                                           const ExploreParams& explore, const TrainConfig& cfg, Rng& rng) {
  std::vector<TransitionSample> out;
  std::normal_distribution<double> noise(0.0, 1.0);
  PublicBeliefState pbs = initial_pbs(cfg.game);
  while (!pbs.state.is_terminal()) {
    if (pbs.state.is_chance()) {
      pbs = take_chance(pbs, rng);
      continue;
    }
    TransitionSample sample;
    sample.s = encode_state(pbs);
    sample.a = actor_action(actor, sample.s);
    for (double& x : sample.a) x = std::clamp(x + explore.noise_sigma * noise(rng), -1.0, 1.0);
    const auto rr = reward(pbs, sample.a, solve_cfg, cfg.bet_range);
    sample.r = rr.r;
    out.push_back(sample);

    const RebelResult& line = uniform01(rng) < explore.eta ? rr.base : rr.mdp;
    const auto& abs = line.root_abstraction;
    GameAction action;
    if (uniform01(rng) < explore.epsilon) {
      action = abs[std::uniform_int_distribution<size_t>(0, abs.size() - 1)(rng)];
    } else {
      const auto policy = hand_policy(pbs, abs, line.strategy);
      const auto& b = pbs.beliefs[pbs.state.acting];
      std::vector<double> marginal(abs.size(), 0.0);
      for (size_t h = 0; h < b.size(); ++h) {
        for (size_t i = 0; i < abs.size(); ++i) marginal[i] += b[h] * policy[h * abs.size() + i];
      }
      action = abs[std::max(0, draw_index(marginal, rng))];
    }
    pbs = pbs_transition(pbs, abs, line.strategy, action, true);
  }
  return out;
}

Gradients critic_gradient(const Mlp& critic, const std::vector<TransitionSample>& batch, double* mse) {
  const int in = critic.spec().input_size();
  Eigen::MatrixXd x(in, batch.size());
  for (size_t j = 0; j < batch.size(); ++j) {
    const auto& t = batch[j];
    if (static_cast<int>(t.s.size() + t.a.size()) != in) throw Error(ErrorCode::kDimMismatch, "critic input");
    x.col(j).head(t.s.size()) = Eigen::Map<const Eigen::VectorXd>(t.s.data(), t.s.size());
    x.col(j).tail(t.a.size()) = Eigen::Map<const Eigen::VectorXd>(t.a.data(), t.a.size());
  }
  const Eigen::MatrixXd pred = critic.forward(x);
  Eigen::MatrixXd up(1, batch.size());
  double total = 0.0;
  for (size_t j = 0; j < batch.size(); ++j) {
    const auto [l, g] = squared_error(pred(0, j), batch[j].r);
    total += l;
    up(0, j) = g / batch.size();
  }
  if (mse) *mse = total / batch.size();
  return critic.backward(x, up);
}

Gradients actor_gradient(const Mlp& actor, const Mlp& critic, const std::vector<StateFeatures>& states,
                         double* loss) {
  const int fs = actor.spec().input_size();
  const int na = actor.spec().output_size();
  if (critic.spec().input_size() != fs + na) throw Error(ErrorCode::kDimMismatch, "critic/actor sizes");
  Eigen::MatrixXd s(fs, states.size());
  for (size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(states[j].size()) != fs) throw Error(ErrorCode::kDimMismatch, "actor input");
    s.col(j) = Eigen::Map<const Eigen::VectorXd>(states[j].data(), fs);
  }
  const Eigen::MatrixXd a = actor.forward(s);
  Eigen::MatrixXd x(fs + na, states.size());
  x.topRows(fs) = s;
  x.bottomRows(na) = a;
  const Eigen::MatrixXd q = critic.forward(x);
  if (loss) *loss = -q.mean();
  const Eigen::MatrixXd up = Eigen::MatrixXd::Constant(1, states.size(), -1.0 / states.size());
  const Gradients through = critic.backward(x, up);
  return actor.backward(s, through.input.bottomRows(na));
}

ActorCriticLoss train_actor_critic(const ReplayBuffer<TransitionSample>& buffer, Mlp& actor, AdamState& actor_opt,
                                   Mlp& critic, AdamState& critic_opt, int batch, int steps, Rng& rng) {
  if (buffer.empty()) throw Error(ErrorCode::kInvalidArgument, "empty replay buffer");
  ActorCriticLoss out;
  std::vector<TransitionSample> rows(batch);
  std::vector<StateFeatures> states(batch);
  for (int step = 0; step < steps; ++step) {
    for (int j = 0; j < batch; ++j) {
      rows[j] = buffer.sample(rng);
      states[j] = rows[j].s;
    }
    try {
      adam_step(critic, critic_gradient(critic, rows, &out.critic_mse), critic_opt);
      adam_step(actor, actor_gradient(actor, critic, states, &out.actor_loss), actor_opt);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNonfiniteGrad) {
        throw Error(ErrorCode::kNonfiniteGrad, "actor-critic batch " + std::to_string(step));
      }
      throw;
    }
  }
  return out;
}

double critic_estimate(const Mlp& critic, const StateFeatures& s, const ActionVector& a) {
  std::vector<double> x = s;
  x.insert(x.end(), a.begin(), a.end());
  return critic.forward(x)[0];
}

Rng derive_rng(uint64_t seed, uint64_t stream, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32)};
  return Rng(seq);
}

namespace {

std::map<std::string, std::string> read_kv(const std::string& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

void write_kv(const std::string& path, const std::map<std::string, std::string>& kv) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

std::string ckpt_name(const std::string& role, int stage, int64_t epoch) {
  return role + "_" + std::to_string(stage) + "_" + std::to_string(epoch) + ".ckpt";
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void keep_lines(const std::string& path, size_t n) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < n && std::getline(in, line)) lines.push_back(line);
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

struct ValueStage {
  std::shared_ptr<Mlp> net;
  std::string checkpoint;
  int64_t wall_ms = 0;
};

ValueStage fit_value_net(const TrainConfig& cfg, const fs::path& dir, int stage, const AbstractionPolicy& nonroot,
                         const Mlp* warm_start, const std::function<void(const std::string&)>& log) {
  const int64_t t0 = now_ms();
  Rng rng = derive_rng(cfg.seed, 10 + stage, 0);
  const auto data = generate_value_data(cfg, cfg.value_data.samples, rng, nonroot);
  const auto pbs_log = (dir / ("pbs_" + std::to_string(stage) + ".log")).string();
  fs::remove(pbs_log);
  append_pbs_log(pbs_log, data);
  if (log) log("stage " + std::to_string(stage) + ": " + std::to_string(data.size()) + " labelled PBSs");
  ReplayBuffer<PbsSample> buffer(cfg.pbs_capacity);
  for (const auto& s : data) buffer.push(s);
  ValueStage out;
  out.net = std::make_shared<Mlp>(warm_start ? *warm_start : Mlp::initialized(value_net_spec(cfg), cfg.seed + stage));
  AdamState opt = make_adam(*out.net, cfg.pbs_lr);
  const int batch = std::min<int>(cfg.pbs_batch, buffer.size());
  const auto trace = train_value_net(buffer, *out.net, opt, cfg.value_steps, batch, cfg.huber_delta, rng);
  std::ofstream metrics(dir / ("value_metrics_" + std::to_string(stage) + ".tsv"), std::ios::trunc);
  metrics << "step\thuber\n";
  for (size_t i = 0; i < trace.loss.size(); ++i) {
    if ((i + 1) % 100 == 0 || i + 1 == trace.loss.size()) metrics << i + 1 << '\t' << trace.loss[i] << '\n';
  }
  out.checkpoint = ckpt_name("value", stage, cfg.value_steps);
  save_checkpoint((dir / out.checkpoint).string(), *out.net, &opt);
  out.wall_ms = now_ms() - t0;
  if (log) {
    log("stage " + std::to_string(stage) + ": value net huber " + std::to_string(mean_huber(data, *out.net, cfg.huber_delta)));
  }
  return out;
}

}  // namespace

TrainingArtifacts read_manifest(const std::string& out_dir) {
  const auto kv = read_kv((fs::path(out_dir) / "manifest.txt").string());
  TrainingArtifacts a;
  auto path = [&](const char* key) {
    auto it = kv.find(key);
    return it == kv.end() ? std::string() : (fs::path(out_dir) / it->second).string();
  };
  a.value_checkpoint = path("value");
  a.actor_checkpoint = path("actor");
  a.critic_checkpoint = path("critic");
  if (auto it = kv.find("value_wall_ms"); it != kv.end()) a.value_wall_ms = std::stoll(it->second);
  if (auto it = kv.find("epochs_done"); it != kv.end()) a.epochs_done = std::stoi(it->second);
  return a;
}

TrainingArtifacts run_training(const TrainConfig& cfg, const std::string& out_dir, bool resume,
                               const std::function<void(const std::string&)>& log) {
  if (cfg.epochs < 0 || cfg.rl_batch <= 0 || cfg.pbs_batch <= 0 || cfg.value_steps < 0) {
    throw Error(ErrorCode::kConfig, "sizes must be positive");
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto manifest_path = (dir / "manifest.txt").string();
  auto kv = resume ? read_kv(manifest_path) : std::map<std::string, std::string>{};
  const bool has_leaves = cfg.game.kind == GameKind::kNlLeduc;

  // Stage 1: value network.
  std::shared_ptr<Mlp> value_net;
  if (has_leaves) {
    if (kv.count("value") && kv.count("value_stage") && kv["value_stage"] == "1") {
      value_net = std::make_shared<Mlp>(load_checkpoint((dir / kv["value"]).string(), value_net_spec(cfg)).net);
    } else {
      auto v = fit_value_net(cfg, dir, 1, base_nonroot_policy(), nullptr, log);
      value_net = v.net;
      kv["value"] = v.checkpoint;
      kv["value_stage"] = "1";
      kv["value_wall_ms"] = std::to_string(v.wall_ms);
      kv.erase("actor");
      kv.erase("critic");
      kv.erase("epochs_done");
      write_kv(manifest_path, kv);
    }
  }
  const PbsValueFn value_fn = value_net ? net_value_fn(value_net) : PbsValueFn{};

  // Stage 2: actor-critic.
  auto actor = std::make_shared<Mlp>(Mlp::initialized(actor_spec(cfg), cfg.seed + 100));
  Mlp critic = Mlp::initialized(critic_spec(cfg), cfg.seed + 200);
  AdamState actor_opt = make_adam(*actor, cfg.rl_lr);
  AdamState critic_opt = make_adam(critic, cfg.rl_lr);
  ReplayBuffer<TransitionSample> buffer(cfg.rl_capacity);
  const auto rl_log = (dir / "rl.log").string();
  const auto metrics_path = (dir / "metrics.tsv").string();
  int start = 1;
  if (kv.count("epochs_done")) {
    const int done = std::stoi(kv["epochs_done"]);
    auto a = load_checkpoint((dir / kv["actor"]).string(), actor_spec(cfg));
    auto c = load_checkpoint((dir / kv["critic"]).string(), critic_spec(cfg));
    *actor = a.net;
    critic = c.net;
    if (a.opt) actor_opt = *a.opt;
    if (c.opt) critic_opt = *c.opt;
    const size_t records = std::stoull(kv["rl_records"]);
    if (records > 0) {
      truncate_log(rl_log, kRlLogMagic, records);
      for (auto& t : read_rl_log(rl_log)) buffer.push(std::move(t));
    } else {
      fs::remove(rl_log);
    }
    keep_lines(metrics_path, done + 1);
    start = done + 1;
    if (log) log("resuming after epoch " + std::to_string(done));
  } else {
    fs::remove(rl_log);
    std::ofstream(metrics_path, std::ios::trunc) << "epoch\tn_samples\tmean_reward\tcritic_mse\tactor_loss\twall_ms\n";
  }
  std::ofstream metrics(metrics_path, std::ios::app);
  metrics.precision(17);
  uint64_t records = buffer.inserted();
  for (int epoch = start; epoch <= cfg.epochs; ++epoch) {
    const int64_t t0 = now_ms();
    Rng rng = derive_rng(cfg.seed, 2, epoch);
    const auto snapshot = std::make_shared<const Mlp>(*actor);
    const RebelConfig solve_cfg = rebel_config(cfg, value_fn, snapshot);
    std::vector<TransitionSample> samples;
    try {
      samples = sample_epoch(*snapshot, solve_cfg, cfg.explore, cfg, rng);
    } catch (const Error& e) {
      if (log) log("epoch " + std::to_string(epoch) + " aborted: " + e.what());
      samples.clear();
    }
    double mean_reward = 0.0;
    for (const auto& s : samples) mean_reward += s.r;
    if (!samples.empty()) mean_reward /= samples.size();
    if (!samples.empty()) append_rl_log(rl_log, samples);
    for (auto& s : samples) buffer.push(std::move(s));
    records += samples.size();
    ActorCriticLoss loss;
    if (epoch > cfg.warmup_epochs && !buffer.empty()) {
      const int batch = std::min<int>(cfg.rl_batch, buffer.size());
      loss = train_actor_critic(buffer, *actor, actor_opt, critic, critic_opt, batch, cfg.updates_per_epoch, rng);
    }
    metrics << epoch << '\t' << samples.size() << '\t' << mean_reward << '\t' << loss.critic_mse << '\t'
            << loss.actor_loss << '\t' << now_ms() - t0 << '\n';
    if (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs) {
      metrics.flush();
      kv["actor"] = ckpt_name("actor", 2, epoch);
      kv["critic"] = ckpt_name("critic", 2, epoch);
      save_checkpoint((dir / kv["actor"]).string(), *actor, &actor_opt);
      save_checkpoint((dir / kv["critic"]).string(), critic, &critic_opt);
      kv["epochs_done"] = std::to_string(epoch);
      kv["rl_records"] = std::to_string(records);
      write_kv(manifest_path, kv);
      if (log) log("epoch " + std::to_string(epoch) + " checkpointed");
    }
  }
  metrics.close();

  // Stage 3: refit the value network under the learned abstractions.
  if (cfg.stages >= 3 && has_leaves && kv["value_stage"] != "3") {
    auto v = fit_value_net(cfg, dir, 3, learned_nonroot_policy(actor, cfg.bet_range), value_net.get(), log);
    kv["value"] = v.checkpoint;
    kv["value_stage"] = "3";
    write_kv(manifest_path, kv);
  }
  return read_manifest(out_dir);
}

}  // namespace rlcfr
