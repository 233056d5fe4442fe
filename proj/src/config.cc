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

#include "rlcfr/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rlcfr/error.h"

namespace rlcfr {

namespace pt = boost::property_tree;

namespace {

template <typename T>
T to(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) throw Error(ErrorCode::kConfig, "bad value for " + key + ": '" + text + "'");
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw Error(ErrorCode::kConfig, "bad boolean for " + key + ": '" + text + "'");
}

std::vector<int> to_sizes(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(to<int>(key, part));
  if (out.empty()) throw Error(ErrorCode::kConfig, key + " needs at least one size");
  return out;
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"game.kind", [](auto& c, auto&, auto& v) { c.train.game.kind = parse_game_kind(v); }},
      {"game.stack", [](auto& c, auto& k, auto& v) { c.train.game.stack = to<int>(k, v); }},
      {"game.ante", [](auto& c, auto& k, auto& v) { c.train.game.ante = to<int>(k, v); }},
      {"solver.alpha", [](auto& c, auto& k, auto& v) { c.train.solver.alpha = to<double>(k, v); }},
      {"solver.beta", [](auto& c, auto& k, auto& v) { c.train.solver.beta = to<double>(k, v); }},
      {"solver.gamma", [](auto& c, auto& k, auto& v) { c.train.solver.gamma = to<double>(k, v); }},
      {"solver.iterations", [](auto& c, auto& k, auto& v) { c.train.solver.iterations = to<int>(k, v); }},
      {"solver.alternating", [](auto& c, auto& k, auto& v) { c.train.solver.alternating = to_bool(k, v); }},
      {"explore.noise_sigma", [](auto& c, auto& k, auto& v) { c.train.explore.noise_sigma = to<double>(k, v); }},
      {"explore.eta", [](auto& c, auto& k, auto& v) { c.train.explore.eta = to<double>(k, v); }},
      {"explore.epsilon", [](auto& c, auto& k, auto& v) { c.train.explore.epsilon = to<double>(k, v); }},
      {"explore.perturb", [](auto& c, auto& k, auto& v) { c.train.explore.perturb = to_bool(k, v); }},
      {"value.hidden", [](auto& c, auto& k, auto& v) { c.train.value_hidden = to_sizes(k, v); }},
      {"value.samples", [](auto& c, auto& k, auto& v) { c.train.value_data.samples = to<int>(k, v); }},
      {"value.synthetic_fraction",
       [](auto& c, auto& k, auto& v) { c.train.value_data.synthetic_fraction = to<double>(k, v); }},
      {"value.leaves_per_solve",
       [](auto& c, auto& k, auto& v) { c.train.value_data.leaves_per_solve = to<int>(k, v); }},
      {"value.dirichlet_alpha",
       [](auto& c, auto& k, auto& v) { c.train.value_data.dirichlet_alpha = to<double>(k, v); }},
      {"value.label_iterations",
       [](auto& c, auto& k, auto& v) { c.train.value_data.label_iterations = to<int>(k, v); }},
      {"value.steps", [](auto& c, auto& k, auto& v) { c.train.value_steps = to<int>(k, v); }},
      {"value.batch", [](auto& c, auto& k, auto& v) { c.train.pbs_batch = to<int>(k, v); }},
      {"value.lr", [](auto& c, auto& k, auto& v) { c.train.pbs_lr = to<double>(k, v); }},
      {"value.huber_delta", [](auto& c, auto& k, auto& v) { c.train.huber_delta = to<double>(k, v); }},
      {"value.capacity", [](auto& c, auto& k, auto& v) { c.train.pbs_capacity = to<size_t>(k, v); }},
      {"train.seed", [](auto& c, auto& k, auto& v) { c.train.seed = to<uint64_t>(k, v); }},
      {"train.stage",
       [](auto& c, auto& k, auto& v) {
         if (v == "base-nonroot") {
           c.train.stage = TrainStage::kBaseNonroot;
         } else if (v == "learned-nonroot") {
           c.train.stage = TrainStage::kLearnedNonroot;
         } else {
           throw Error(ErrorCode::kConfig, "bad value for " + k + ": '" + v + "'");
         }
       }},
      {"train.k", [](auto& c, auto& k, auto& v) { c.train.k = to<int>(k, v); }},
      {"train.bet_range", [](auto& c, auto& k, auto& v) { c.train.bet_range = to<double>(k, v); }},
      {"train.actor_hidden", [](auto& c, auto& k, auto& v) { c.train.actor_hidden = to_sizes(k, v); }},
      {"train.critic_hidden", [](auto& c, auto& k, auto& v) { c.train.critic_hidden = to_sizes(k, v); }},
      {"train.epochs", [](auto& c, auto& k, auto& v) { c.train.epochs = to<int>(k, v); }},
      {"train.batch", [](auto& c, auto& k, auto& v) { c.train.rl_batch = to<int>(k, v); }},
      {"train.lr", [](auto& c, auto& k, auto& v) { c.train.rl_lr = to<double>(k, v); }},
      {"train.updates_per_epoch", [](auto& c, auto& k, auto& v) { c.train.updates_per_epoch = to<int>(k, v); }},
      {"train.warmup_epochs", [](auto& c, auto& k, auto& v) { c.train.warmup_epochs = to<int>(k, v); }},
      {"train.capacity", [](auto& c, auto& k, auto& v) { c.train.rl_capacity = to<size_t>(k, v); }},
      {"train.checkpoint_every", [](auto& c, auto& k, auto& v) { c.train.checkpoint_every = to<int>(k, v); }},
      {"train.stages", [](auto& c, auto& k, auto& v) { c.train.stages = to<int>(k, v); }},
      {"eval.agent_a", [](auto& c, auto&, auto& v) { c.eval.agent_a = parse_agent_kind(v); }},
      {"eval.agent_b", [](auto& c, auto&, auto& v) { c.eval.agent_b = parse_agent_kind(v); }},
      {"eval.hands", [](auto& c, auto& k, auto& v) { c.eval.hands = to<int64_t>(k, v); }},
      {"eval.gate", [](auto& c, auto& k, auto& v) { c.eval.gate = to_bool(k, v); }},
      {"eval.run_dir", [](auto& c, auto&, auto& v) { c.eval.run_dir = v; }},
      {"eval.exploit_states", [](auto& c, auto& k, auto& v) { c.eval.exploit_states = to<int>(k, v); }},
      {"eval.ledger", [](auto& c, auto&, auto& v) { c.eval.ledger = v; }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  const auto& t = c.train;
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfig, what);
  };
  need(t.game.ante > 0 && t.game.stack >= t.game.ante, "game.ante must be positive and at most game.stack");
  need(t.solver.iterations > 0, "solver.iterations must be positive");
  need(t.explore.noise_sigma >= 0.0, "explore.noise_sigma must be non-negative");
  need(t.explore.eta >= 0.0 && t.explore.eta <= 1.0, "explore.eta must lie in [0, 1]");
  need(t.explore.epsilon >= 0.0 && t.explore.epsilon <= 1.0, "explore.epsilon must lie in [0, 1]");
  need(t.k > 0, "train.k must be positive");
  need(t.rl_batch > 0 && t.pbs_batch > 0, "batch sizes must be positive");
  need(t.epochs >= 0 && t.value_steps >= 0, "epochs and steps must be non-negative");
  need(t.checkpoint_every > 0, "train.checkpoint_every must be positive");
  need(t.rl_capacity > 0 && t.pbs_capacity > 0, "capacities must be positive");
  need(t.stages == 2 || t.stages == 3, "train.stages must be 2 or 3");
  need(t.huber_delta > 0.0, "value.huber_delta must be positive");
  need(c.eval.hands >= 0, "eval.hands must be non-negative");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, e.message() + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig cfg;
  cfg.train.game = GameConfig::nl_leduc();
  bool game_set = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw Error(ErrorCode::kConfig, "key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw Error(ErrorCode::kConfig, "unknown key " + full);
      if (full == "game.kind") {
        // Per-game stack and ante defaults apply before explicit overrides.
        cfg.train.game = GameConfig::defaults(parse_game_kind(value.data()));
        game_set = true;
      }
      it->second(cfg, full, value.data());
    }
  }
  if (game_set) {
    // Re-apply explicit sizes that may have been read before the kind.
    if (auto s = tree.get_optional<std::string>("game.stack")) cfg.train.game.stack = to<int>("game.stack", *s);
    if (auto a = tree.get_optional<std::string>("game.ante")) cfg.train.game.ante = to<int>("game.ante", *a);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ExperimentConfig& c) {
  const auto& t = c.train;
  std::ostringstream out;
  out.precision(17);
  out << "[game]\nkind = " << game_kind_name(t.game.kind) << "\nstack = " << t.game.stack << "\nante = " << t.game.ante
      << "\n\n[solver]\nalpha = " << t.solver.alpha << "\nbeta = " << t.solver.beta << "\ngamma = " << t.solver.gamma
      << "\niterations = " << t.solver.iterations << "\nalternating = " << (t.solver.alternating ? "true" : "false")
      << "\n\n[explore]\nnoise_sigma = " << t.explore.noise_sigma << "\neta = " << t.explore.eta
      << "\nepsilon = " << t.explore.epsilon << "\nperturb = " << (t.explore.perturb ? "true" : "false")
      << "\n\n[value]\nhidden = " << join(t.value_hidden) << "\nsamples = " << t.value_data.samples
      << "\nsynthetic_fraction = " << t.value_data.synthetic_fraction
      << "\nleaves_per_solve = " << t.value_data.leaves_per_solve
      << "\ndirichlet_alpha = " << t.value_data.dirichlet_alpha
      << "\nlabel_iterations = " << t.value_data.label_iterations << "\nsteps = " << t.value_steps
      << "\nbatch = " << t.pbs_batch << "\nlr = " << t.pbs_lr << "\nhuber_delta = " << t.huber_delta
      << "\ncapacity = " << t.pbs_capacity << "\n\n[train]\nseed = " << t.seed
      << "\nstage = " << (t.stage == TrainStage::kBaseNonroot ? "base-nonroot" : "learned-nonroot")
      << "\nk = " << t.k << "\nbet_range = " << t.bet_range << "\nactor_hidden = " << join(t.actor_hidden)
      << "\ncritic_hidden = " << join(t.critic_hidden) << "\nepochs = " << t.epochs << "\nbatch = " << t.rl_batch
      << "\nlr = " << t.rl_lr << "\nupdates_per_epoch = " << t.updates_per_epoch
      << "\nwarmup_epochs = " << t.warmup_epochs << "\ncapacity = " << t.rl_capacity
      << "\ncheckpoint_every = " << t.checkpoint_every << "\nstages = " << t.stages
      << "\n\n[eval]\nagent_a = " << agent_kind_name(c.eval.agent_a) << "\nagent_b = " << agent_kind_name(c.eval.agent_b)
      << "\nhands = " << c.eval.hands << "\ngate = " << (c.eval.gate ? "true" : "false")
      << "\nrun_dir = " << c.eval.run_dir << "\nexploit_states = " << c.eval.exploit_states
      << "\nledger = " << c.eval.ledger << "\n";
  return out.str();
}

}  // namespace rlcfr
