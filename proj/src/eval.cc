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

#include "rlcfr/eval.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>

#include "rlcfr/error.h"

namespace rlcfr {

namespace {

constexpr ExploreParams kNoExplore{0.0, 0.0, 0.0, false};

std::string pbs_key(const PublicBeliefState& pbs) {
  std::string key = public_key(pbs.state);
  for (const auto& b : pbs.beliefs) {
    key.append(reinterpret_cast<const char*>(b.data()), b.size() * sizeof(double));
  }
  return key;
}

int pick(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  u *= total;
  int last = -1;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = static_cast<int>(i);
    if (u < weights[i]) return last;
    u -= weights[i];
  }
  if (last < 0) throw Error(ErrorCode::kZeroReach, "nothing to sample");
  return last;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double raise_chips(const GameAction& a, const PublicState& state) {
  return a.kind == ActionKind::kAllIn ? all_in_amount(state) : a.amount;
}

double mean_se(const std::vector<double>& xs, double* se) {
  const double n = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  *se = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
  return mean;
}

}  // namespace

std::string agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kRlcfr: return "rlcfr";
    case AgentKind::kBaseFixed: return "base";
    case AgentKind::kMulAction: return "mul-action";
    case AgentKind::kFineGrain: return "fine-grain";
    case AgentKind::kUniform: return "uniform";
    case AgentKind::kExactNash: return "exact-nash";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& name) {
  for (auto k : {AgentKind::kRlcfr, AgentKind::kBaseFixed, AgentKind::kMulAction, AgentKind::kFineGrain,
                 AgentKind::kUniform, AgentKind::kExactNash}) {
    if (agent_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown agent kind '" + name + "'");
}

AgentResources load_resources(const TrainConfig& train, const std::string& run_dir) {
  AgentResources res;
  res.train = train;
  if (run_dir.empty()) return res;
  const auto m = read_manifest(run_dir);
  if (!m.value_checkpoint.empty()) {
    res.value_net = std::make_shared<const Mlp>(load_checkpoint(m.value_checkpoint, value_net_spec(train)).net);
  }
  if (!m.actor_checkpoint.empty()) {
    res.actor = std::make_shared<const Mlp>(load_checkpoint(m.actor_checkpoint, actor_spec(train)).net);
    res.critic = std::make_shared<const Mlp>(load_checkpoint(m.critic_checkpoint, critic_spec(train)).net);
  }
  return res;
}

Agent::Agent(AgentSpec spec, AgentResources res) : spec_(std::move(spec)), res_(std::move(res)) {
  if (res_.value_net) value_fn_ = net_value_fn(res_.value_net);
  if (spec_.kind == AgentKind::kRlcfr && (!res_.actor || !res_.critic)) {
    throw Error(ErrorCode::kInvalidArgument, "rlcfr agent needs actor and critic checkpoints");
  }
}

AbstractionPolicy Agent::nonroot() const {
  if (spec_.kind == AgentKind::kExactNash && res_.train.game.kind != GameKind::kNlLeduc) return full_legal_policy();
  if (spec_.kind == AgentKind::kRlcfr && res_.train.stage == TrainStage::kLearnedNonroot) {
    return learned_nonroot_policy(res_.actor, res_.train.bet_range);
  }
  return base_nonroot_policy();
}

RebelConfig Agent::rebel(int max_rounds) const {
  RebelConfig cfg;
  cfg.params = spec_.params;
  cfg.nonroot = nonroot();
  cfg.depth = DepthRule{max_rounds};
  cfg.value_fn = value_fn_;
  return cfg;
}

ActionAbstraction Agent::root_abstraction(const PublicBeliefState& pbs) const {
  const auto& s = pbs.state;
  switch (spec_.kind) {
    case AgentKind::kFineGrain: return fine_grain_abstraction(s);
    case AgentKind::kExactNash:
      return res_.train.game.kind == GameKind::kNlLeduc ? base_abstraction(s) : legal_actions(s);
    case AgentKind::kRlcfr: {
      const auto f = encode_state(s);
      const auto a = actor_action(*res_.actor, f);
      if (spec_.gate && critic_estimate(*res_.critic, f, a) < 0.0) return base_abstraction(s);
      return decode_abstraction(s, a, res_.train.bet_range);
    }
    default: return base_abstraction(s);
  }
}

StrategyProfile uniform_profile(const SubgameTree& tree) {
  StrategyProfile out;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    if (node.kind != NodeKind::kDecision) continue;
    const int p = node.acting();
    const size_t na = node.actions.size();
    for (int h = 0; h < tree.num_hands; ++h) {
      if (!tree.hand_live(p, h, i)) continue;
      std::vector<double> row(na, 0.0);
      int open = 0;
      for (size_t a = 0; a < na; ++a) open += node.allowed(h, a);
      for (size_t a = 0; a < na; ++a) row[a] = node.allowed(h, a) ? 1.0 / open : 0.0;
      out[tree.infostate(i, h)] = row;
    }
  }
  return out;
}

AgentSolve Agent::compute(const PublicBeliefState& pbs) const {
  if (!pbs.state.is_decision()) throw Error(ErrorCode::kNotDecisionPbs, public_key(pbs.state));
  AgentSolve out;
  switch (spec_.kind) {
    case AgentKind::kUniform: {
      out.abstraction = base_abstraction(pbs.state);
      const auto tree = build_subgame(pbs, out.abstraction, nonroot(), DepthRule{0});
      out.strategy = uniform_profile(tree);
      return out;
    }
    case AgentKind::kMulAction: {
      const auto choice = mul_action_select(pbs, mul_action_candidates(pbs.state), rebel(1));
      out.abstraction = choice.best.root_abstraction;
      out.strategy = choice.best.strategy;
      out.root_value = choice.best.root_value;
      return out;
    }
    case AgentKind::kExactNash: return solve_full(pbs);
    default: {
      const auto solved = rebel_solve(pbs, root_abstraction(pbs), rebel(1), kNoExplore, nullptr);
      out.abstraction = solved.root_abstraction;
      out.strategy = solved.strategy;
      out.root_value = solved.root_value;
      return out;
    }
  }
}

const AgentSolve& Agent::decide(const PublicBeliefState& pbs) {
  const auto key = pbs_key(pbs);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, compute(pbs)).first;
  return it->second;
}

AgentSolve Agent::solve_full(const PublicBeliefState& pbs) const {
  if (spec_.kind != AgentKind::kExactNash) {
    if (spec_.kind == AgentKind::kUniform || spec_.kind == AgentKind::kMulAction) return compute(pbs);
    const auto solved = rebel_solve(pbs, root_abstraction(pbs), rebel(0), kNoExplore, nullptr);
    return {solved.root_abstraction, solved.strategy, solved.root_value};
  }
  // Iterate until the profile is verified to be within tolerance.
  AgentSolve out;
  out.abstraction = root_abstraction(pbs);
  const auto tree = build_subgame(pbs, out.abstraction, nonroot(), DepthRule{0});
  if (!tree.leaves.empty()) throw Error(ErrorCode::kInvalidArgument, "exact solve needs the whole remaining game");
  DcfrParams params = spec_.params;
  params.iterations = spec_.nash_max_iterations;
  DcfrSolver solver(tree, params);
  const double ante = pbs.state.config.ante;
  for (int chunk = 500; solver.iteration() < params.iterations; chunk = std::min(2 * chunk, 8000)) {
    for (int i = 0; i < chunk && solver.iteration() < params.iterations; ++i) solver.step();
    const auto [e0, e1] = exploitability(tree, solver.average_strategy());
    if ((e0 + e1) / ante <= spec_.nash_tolerance) break;
  }
  const auto r = solver.result();
  out.strategy = r.average;
  out.root_value = r.root_value;
  return out;
}

GameAction round_off_tree(const GameAction& observed, const ActionAbstraction& abstraction,
                          const PublicState& state) {
  if (abstraction.empty()) throw Error(ErrorCode::kEmptyAbstraction, "cannot round into an empty abstraction");
  if (std::find(abstraction.begin(), abstraction.end(), observed) != abstraction.end()) return observed;
  if (!observed.is_raise()) {
    // A missing fold or call maps to the cheapest remaining action.
    return abstraction.front();
  }
  const double target = std::log(raise_chips(observed, state));
  std::optional<GameAction> best;
  double best_gap = 0.0;
  for (const auto& a : abstraction) {
    if (!a.is_raise()) continue;
    const double gap = std::abs(std::log(raise_chips(a, state)) - target);
    // Abstractions ascend, so strict < keeps the smaller bet on a tie.
    if (!best || gap < best_gap - 1e-12) {
      best = a;
      best_gap = gap;
    }
  }
  return best ? *best : abstraction.front();
}

std::string format_hand(const HandRecord& r) {
  std::ostringstream out;
  out.precision(17);
  out << "hand=" << r.hand << " seed=" << r.seed << " seats=" << (r.seats[0] ? 'b' : 'a') << ','
      << (r.seats[1] ? 'b' : 'a') << " actions=";
  for (size_t i = 0; i < r.actions.size(); ++i) out << (i ? "." : "") << to_string(r.actions[i]);
  out << " net=" << r.net[0] << ',' << r.net[1];
  return out.str();
}

HandRecord parse_hand(const std::string& line) {
  HandRecord r;
  std::istringstream in(line);
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "bad ledger field " + field);
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "hand") {
      r.hand = std::stoll(value);
    } else if (key == "seed") {
      r.seed = std::stoull(value);
    } else if (key == "seats") {
      r.seats = {value.at(0) == 'b', value.at(2) == 'b'};
    } else if (key == "actions") {
      std::istringstream tokens(value);
      std::string t;
      while (std::getline(tokens, t, '.')) {
        if (!t.empty()) r.actions.push_back(parse_action(t));
      }
    } else if (key == "net") {
      const auto comma = value.find(',');
      r.net = {std::stod(value.substr(0, comma)), std::stod(value.substr(comma + 1))};
    }
  }
  return r;
}

std::array<double, 2> replay_net(const GameConfig& game, const HandRecord& record) {
  const auto g = replay(game, record.actions);
  if (!g.is_terminal()) throw Error(ErrorCode::kNotTerminal, "ledger hand did not finish");
  return {terminal_utility(g, 0), terminal_utility(g, 1)};
}

namespace {

// Moves the PBS along the concrete history, asking the acting agent for the
// strategy that explains each public action.
void sync(PublicBeliefState& pbs, const GameState& g, const std::array<Agent*, 2>& seat_agent) {
  const auto& target = g.pub().history;
  while (pbs.state.history.size() < target.size()) {
    const auto& a = target[pbs.state.history.size()];
    if (a.kind == ActionKind::kChanceOutcome) {
      pbs = reveal_board(pbs, a.outcome_id);
    } else {
      const auto& d = seat_agent[pbs.state.acting]->decide(pbs);
      pbs = pbs_transition(pbs, d.abstraction, d.strategy, a);
    }
  }
}

HandRecord play_hand(const GameConfig& game, const std::array<Agent*, 2>& seat_agent, double u_deal,
                     double u_board, Rng& action_rng) {
  HandRecord rec;
  GameState g = GameState::initial(game);
  {
    const auto outcomes = chance_outcomes(g);
    std::vector<double> w;
    for (const auto& [a, p] : outcomes) w.push_back(p);
    g = apply(g, outcomes[pick(w, u_deal)].first);
  }
  PublicBeliefState pbs = initial_pbs(game);
  while (true) {
    sync(pbs, g, seat_agent);
    if (g.is_terminal()) break;
    if (g.is_chance()) {
      const auto outcomes = chance_outcomes(g);
      std::vector<double> w;
      for (const auto& [a, p] : outcomes) w.push_back(p);
      g = apply(g, outcomes[pick(w, u_board)].first);
      continue;
    }
    const int p = g.acting();
    const auto& d = seat_agent[p]->decide(pbs);
    const auto key = infostate_key(pbs.state, p, g.private_card(p));
    const auto it = d.strategy.find(key);
    if (it == d.strategy.end()) throw Error(ErrorCode::kIncompleteProfile, "agent has no strategy for " + key);
    g = apply(g, d.abstraction[pick(it->second, uniform01(action_rng))]);
  }
  rec.actions = g.action_history();
  rec.net = {terminal_utility(g, 0), terminal_utility(g, 1)};
  return rec;
}

}  // namespace

MatchResult play_match(Agent& a, Agent& b, const GameConfig& game, int64_t n_hands, uint64_t seed,
                       const MatchOptions& options) {
  MatchResult out;
  out.n_hands = std::max<int64_t>(0, n_hands);
  if (out.n_hands == 0) return out;
  std::vector<double> units;  // per pair (mirrored) or per hand
  const double scale = 1000.0 / game.ante;
  double total = 0.0;
  const int64_t n_groups = options.mirrored ? (out.n_hands + 1) / 2 : out.n_hands;
  for (int64_t k = 0; k < n_groups; ++k) {
    Rng deal_rng = derive_rng(seed, 3, k);
    const double u_deal = uniform01(deal_rng);
    const double u_board = uniform01(deal_rng);
    double group = 0.0;
    int played = 0;
    for (int swap = 0; swap < (options.mirrored ? 2 : 1); ++swap) {
      const int64_t hand = options.mirrored ? 2 * k + swap : k;
      if (hand >= out.n_hands) break;
      // Mirrored pairs share cards and action draws; only the seats swap.
      const int a_seat = options.mirrored ? swap : static_cast<int>(hand % 2);
      std::array<Agent*, 2> seats{};
      seats[a_seat] = &a;
      seats[1 - a_seat] = &b;
      Rng action_rng = derive_rng(seed, 4, k);
      HandRecord rec = play_hand(game, seats, u_deal, u_board, action_rng);
      rec.hand = hand;
      rec.seed = seed;
      rec.seats = {a_seat == 0 ? 0 : 1, a_seat == 0 ? 1 : 0};
      const double net_a = rec.net[a_seat];
      group += net_a;
      total += net_a;
      ++played;
      if (options.ledger) *options.ledger << format_hand(rec) << '\n' << std::flush;
      out.ledger.push_back(std::move(rec));
    }
    units.push_back(group / played * scale);
  }
  out.win_rate = total / out.n_hands * scale;
  double se = 0.0;
  mean_se(units, &se);
  out.se = se;
  out.se_defined = units.size() > 1;
  return out;
}

std::vector<PublicBeliefState> sample_round2_states(const GameConfig& game, int n_states, uint64_t seed,
                                                    const DcfrParams& blueprint_params) {
  if (game.kind != GameKind::kNlLeduc) throw Error(ErrorCode::kInvalidArgument, "round-two states need nl-leduc");
  const auto root = initial_pbs(game);
  const auto tree = build_subgame(root, base_abstraction(root.state), base_nonroot_policy(), DepthRule{0});
  const auto blueprint = solve(tree, blueprint_params).average;
  std::map<std::string, int> node_of;
  for (size_t i = 0; i < tree.nodes.size(); ++i) node_of.emplace(tree.nodes[i].key, i);
  std::vector<PublicBeliefState> out;
  for (uint64_t attempt = 0; static_cast<int>(out.size()) < n_states; ++attempt) {
    Rng rng = derive_rng(seed, 5, attempt);
    GameState g = GameState::initial(game);
    PublicBeliefState pbs = root;
    while (!g.is_terminal() && !(g.pub().round == 1 && g.pub().is_decision())) {
      if (g.is_chance()) {
        const auto outcomes = chance_outcomes(g);
        std::vector<double> w;
        for (const auto& [a, p] : outcomes) w.push_back(p);
        g = apply(g, outcomes[pick(w, uniform01(rng))].first);
        if (g.pub().round == 1) pbs = reveal_board(pbs, g.pub().board);
        continue;
      }
      const int p = g.acting();
      const auto& node = tree.nodes.at(node_of.at(public_key(pbs.state)));
      const auto& row = blueprint.at(infostate_key(pbs.state, p, g.private_card(p)));
      const auto action = node.actions[pick(row, uniform01(rng))];
      pbs = pbs_transition(pbs, node.actions, blueprint, action);
      g = apply(g, action);
    }
    if (!g.is_terminal()) out.push_back(pbs);
  }
  return out;
}

double state_exploitability(const Agent& agent, const PublicBeliefState& pbs) {
  const auto solved = agent.solve_full(pbs);
  const auto tree = build_subgame(pbs, solved.abstraction, agent.nonroot(), DepthRule{0});
  const auto [e0, e1] = exploitability(tree, solved.strategy);
  return (e0 + e1) / pbs.state.config.ante;
}

ExploitabilityReport evaluate_exploitability(const Agent& agent, const std::vector<PublicBeliefState>& states) {
  ExploitabilityReport out;
  for (const auto& s : states) out.per_state.push_back(state_exploitability(agent, s));
  if (!out.per_state.empty()) out.mean = mean_se(out.per_state, &out.se);
  return out;
}

ExploitabilityReport evaluate_exploitability(const Agent& agent, const GameConfig& game, int n_states,
                                             uint64_t seed) {
  return evaluate_exploitability(agent, sample_round2_states(game, n_states, seed, agent.spec().params));
}

}  // namespace rlcfr
