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

#include "rlcfr/subgame.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlcfr/error.h"

namespace rlcfr {

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Index drawn proportionally to non-negative weights.
int draw(const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = uniform01(rng) * total;
  int last = -1;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

void normalize_or_uniform(std::vector<double>& b, int board) {
  for (size_t h = 0; h < b.size(); ++h) {
    if (static_cast<int>(h) == board) b[h] = 0.0;
  }
  double total = std::accumulate(b.begin(), b.end(), 0.0);
  if (total <= 0.0) {
    for (size_t h = 0; h < b.size(); ++h) b[h] = static_cast<int>(h) == board ? 0.0 : 1.0;
    total = std::accumulate(b.begin(), b.end(), 0.0);
  }
  for (double& x : b) x /= total;
}

}  // namespace

PublicBeliefState initial_pbs(const GameConfig& config) {
  return {initial_public_state(config), prior_beliefs(config)};
}

void check_pbs(const PublicBeliefState& pbs) {
  const int n = num_cards(pbs.state.config.kind);
  for (int p = 0; p < kNumPlayers; ++p) {
    const auto& b = pbs.beliefs[p];
    if (static_cast<int>(b.size()) != n) throw Error(ErrorCode::kDimMismatch, "belief size");
    double total = 0.0;
    for (int h = 0; h < n; ++h) {
      if (!(b[h] >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative belief");
      if (h == pbs.state.board && b[h] > 0.0) throw Error(ErrorCode::kInvalidArgument, "belief on board card");
      total += b[h];
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kInvalidArgument, "beliefs do not sum to 1");
  }
}

std::vector<double> joint_weights(const Beliefs& beliefs, int board) {
  const int n = beliefs[0].size();
  std::vector<double> w(n * n, 0.0);
  double total = 0.0;
  for (int h = 0; h < n; ++h) {
    for (int o = 0; o < n; ++o) {
      if (!cards_compatible(h, o, board)) continue;
      w[h * n + o] = beliefs[0][h] * beliefs[1][o];
      total += w[h * n + o];
    }
  }
  if (total > 0.0) {
    for (double& x : w) x /= total;
  }
  return w;
}

std::vector<double> joint_marginal(const Beliefs& beliefs, int board, int player) {
  const int n = beliefs[0].size();
  const auto w = joint_weights(beliefs, board);
  std::vector<double> m(n, 0.0);
  for (int h = 0; h < n; ++h) {
    for (int o = 0; o < n; ++o) m[player == 0 ? h : o] += w[h * n + o];
  }
  return m;
}

SubgameTree build_subgame(const PublicBeliefState& root, const ActionAbstraction& root_abstraction,
                          const AbstractionPolicy& nonroot, const DepthRule& depth) {
  check_pbs(root);
  if (root.state.is_decision()) {
    for (const auto& a : root_abstraction) {
      if (!is_legal(root.state, a)) {
        throw Error(ErrorCode::kIllegalAbstraction, to_string(a) + " at " + public_key(root.state));
      }
    }
  }
  TreeHooks hooks;
  hooks.actions = [&](const PublicState& s, int d) {
    if (d == 0 && s == root.state) return root_abstraction;
    return nonroot(s, d);
  };
  const int max_rounds = depth.max_rounds;
  hooks.cut = [max_rounds](const PublicState&, int crossed) {
    return max_rounds > 0 && crossed >= max_rounds;
  };
  return build_tree(root.state, root.beliefs, hooks);
}

PublicBeliefState leaf_pbs(const SubgameTree& tree, int node, const Beliefs& reach) {
  PublicBeliefState out{tree.nodes[node].state, reach};
  for (auto& b : out.beliefs) normalize_or_uniform(b, out.state.board);
  return out;
}

LeafEvaluator make_leaf_evaluator(PbsValueFn value_fn) {
  return [value_fn = std::move(value_fn)](const SubgameTree& tree, const std::vector<Beliefs>& reach) {
    std::vector<PublicBeliefState> batch;
    batch.reserve(reach.size());
    for (size_t k = 0; k < reach.size(); ++k) batch.push_back(leaf_pbs(tree, tree.leaves[k], reach[k]));
    return value_fn(batch);
  };
}

std::optional<PublicBeliefState> sample_leaf(const SubgameTree& tree, const std::vector<Beliefs>& reach,
                                             double epsilon, Rng& rng) {
  if (tree.leaves.empty()) return std::nullopt;
  if (uniform01(rng) < epsilon) {
    const int k = std::uniform_int_distribution<int>(0, tree.leaves.size() - 1)(rng);
    return leaf_pbs(tree, tree.leaves[k], reach[tree.leaves[k]]);
  }
  // Outcomes of one joint walk: every leaf and every terminal.
  std::vector<int> ends = tree.leaves;
  ends.insert(ends.end(), tree.terminals.begin(), tree.terminals.end());
  std::vector<double> weights;
  const int n = tree.num_hands;
  for (int node : ends) {
    double chance = 1.0;
    for (int up = tree.nodes[node].parent; up >= 0; up = tree.nodes[up].parent) {
      if (tree.nodes[up].kind == NodeKind::kChance) chance *= board_outcome_weight(tree.nodes[up].state);
    }
    const auto& r = reach[node];
    double w = 0.0;
    for (int h = 0; h < n; ++h) {
      for (int o = 0; o < n; ++o) {
        if (cards_compatible(h, o, tree.nodes[node].state.board)) w += r[0][h] * r[1][o];
      }
    }
    weights.push_back(w * chance);
  }
  const int pick = draw(weights, rng);
  if (pick < 0 || pick >= static_cast<int>(tree.leaves.size())) return std::nullopt;
  return leaf_pbs(tree, tree.leaves[pick], reach[tree.leaves[pick]]);
}

double zero_sum_residual(const ValueVector& values, const PublicBeliefState& pbs) {
  double total = 0.0;
  for (int p = 0; p < kNumPlayers; ++p) {
    const auto m = joint_marginal(pbs.beliefs, pbs.state.board, p);
    for (size_t h = 0; h < m.size(); ++h) total += m[h] * values[p][h];
  }
  return total;
}

ValueVector zero_sum_adjust(const ValueVector& values, const PublicBeliefState& pbs) {
  ValueVector out = values;
  const int board = pbs.state.board;
  if (pbs.state.config.kind == GameKind::kNlLeduc) {
    for (int p = 0; p < kNumPlayers; ++p) {
      const auto& b = pbs.beliefs[p];
      for (int rank = 0; rank < 3; ++rank) {
        const int x = 2 * rank;
        const int y = x + 1;
        if (x == board || y == board) continue;
        const double w = b[x] + b[y];
        const double v = w > 0.0 ? (b[x] * out[p][x] + b[y] * out[p][y]) / w : 0.5 * (out[p][x] + out[p][y]);
        out[p][x] = v;
        out[p][y] = v;
      }
    }
  }
  const double shift = 0.5 * zero_sum_residual(out, pbs);
  for (auto& v : out) {
    for (double& x : v) x -= shift;
  }
  return out;
}

PublicBeliefState perturb_pbs(const PublicBeliefState& pbs, Rng& rng) {
  PublicBeliefState out = pbs;
  const double u = std::uniform_real_distribution<double>(0.9, 1.1)(rng);
  auto& s = out.state;
  const int pot = s.pot();
  const int floor_pot = 2 * s.config.ante;
  const int target = std::max(floor_pot, static_cast<int>(std::floor(pot * u + 0.5)));
  if (s.contrib[0] == s.contrib[1]) {
    s.contrib = {(target + 1) / 2, target / 2};
  } else {
    const int small = s.contrib[0] < s.contrib[1] ? 0 : 1;
    const int scaled = static_cast<int>(std::floor(static_cast<double>(s.contrib[small]) * target / pot));
    s.contrib[small] = std::max(s.config.ante, scaled);
    s.contrib[1 - small] = target - s.contrib[small];
  }
  return out;
}

std::vector<double> hand_policy(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                                const StrategyProfile& profile) {
  const int n = num_cards(pbs.state.config.kind);
  const int p = pbs.state.acting;
  const size_t na = abstraction.size();
  std::vector<double> out(n * na, na ? 1.0 / na : 0.0);
  for (int h = 0; h < n; ++h) {
    if (pbs.beliefs[p][h] <= 0.0) continue;
    const auto key = infostate_key(pbs.state, p, h);
    auto it = profile.find(key);
    if (it == profile.end()) throw Error(ErrorCode::kIncompleteProfile, "missing " + key);
    if (it->second.size() != na) throw Error(ErrorCode::kDimMismatch, "action count for " + key);
    std::copy(it->second.begin(), it->second.end(), out.begin() + h * na);
  }
  return out;
}

PublicBeliefState pbs_transition(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                                 const StrategyProfile& profile, const GameAction& action, bool fallback) {
  if (!pbs.state.is_decision()) throw Error(ErrorCode::kNotDecisionPbs, "transition at a non-decision PBS");
  const auto it = std::find(abstraction.begin(), abstraction.end(), action);
  if (it == abstraction.end()) {
    throw Error(ErrorCode::kIllegalAction, to_string(action) + " not in the abstraction");
  }
  const size_t idx = it - abstraction.begin();
  const auto policy = hand_policy(pbs, abstraction, profile);
  const int p = pbs.state.acting;
  const int n = num_cards(pbs.state.config.kind);
  PublicBeliefState out = pbs;
  out.state = apply(pbs.state, action);
  auto& b = out.beliefs[p];
  double total = 0.0;
  for (int h = 0; h < n; ++h) {
    b[h] = pbs.beliefs[p][h] * policy[h * abstraction.size() + idx];
    total += b[h];
  }
  if (total <= 0.0) {
    if (!fallback) throw Error(ErrorCode::kZeroReach, to_string(action) + " has zero reach");
    // Prior mass on hands for which the action is not ruled out by a forced move.
    for (int h = 0; h < n; ++h) {
      const auto forced = forced_action(pbs.state, p, h);
      b[h] = forced && *forced != action ? 0.0 : pbs.beliefs[p][h];
      total += b[h];
    }
    if (total <= 0.0) throw Error(ErrorCode::kZeroReach, to_string(action) + " is impossible");
  }
  for (double& x : b) x /= total;
  return out;
}

std::vector<double> board_distribution(const PublicBeliefState& pbs) {
  if (pbs.state.phase != Phase::kBoard) throw Error(ErrorCode::kNotChance, "no board reveal pending");
  const int n = num_cards(pbs.state.config.kind);
  std::vector<double> dist(n, 0.0);
  double total = 0.0;
  for (int c = 0; c < n; ++c) {
    for (int h = 0; h < n; ++h) {
      for (int o = 0; o < n; ++o) {
        if (h != o && h != c && o != c) dist[c] += pbs.beliefs[0][h] * pbs.beliefs[1][o];
      }
    }
    total += dist[c];
  }
  if (total <= 0.0) throw Error(ErrorCode::kZeroReach, "no compatible hands");
  for (double& x : dist) x /= total;
  return dist;
}

PublicBeliefState reveal_board(const PublicBeliefState& pbs, int card) {
  PublicBeliefState out = pbs;
  out.state = apply(pbs.state, GameAction::chance(card));
  for (auto& b : out.beliefs) normalize_or_uniform(b, card);
  return out;
}

PublicBeliefState take_chance(const PublicBeliefState& pbs, Rng& rng) {
  return reveal_board(pbs, draw(board_distribution(pbs), rng));
}

RebelResult rebel_solve(const PublicBeliefState& root, const ActionAbstraction& abstraction,
                        const RebelConfig& config, const ExploreParams& explore, Rng* rng) {
  const SubgameTree tree = build_subgame(root, abstraction, config.nonroot, config.depth);
  LeafEvaluator evaluator;
  if (!tree.leaves.empty()) {
    if (!config.value_fn) throw Error(ErrorCode::kLeafEvalFailed, "depth-limited tree without a value function");
    evaluator = make_leaf_evaluator(config.value_fn);
  }
  DcfrSolver solver(tree, config.params, evaluator);
  RebelResult out;
  const int t_sample =
      rng ? std::uniform_int_distribution<int>(1, config.params.iterations)(*rng) : -1;
  solver.run([&](int t, const DcfrSolver& s) {
    if (t == t_sample) out.next_pbs = sample_leaf(tree, s.current_reach(), explore.epsilon, *rng);
  });
  if (out.next_pbs && explore.perturb) out.next_pbs = perturb_pbs(*out.next_pbs, *rng);
  const auto solved = solver.result();
  out.strategy = solved.average;
  if (tree.root().kind == NodeKind::kDecision) out.root_abstraction = tree.root().actions;
  out.root_value = solved.root_value;
  out.root_player = solved.root_player;
  out.root_values = solved.root_values;
  out.sample = {root, solved.root_values};
  return out;
}

ValueVector exact_values(const PublicBeliefState& pbs, const DcfrParams& params,
                         const AbstractionPolicy& nonroot) {
  const ActionAbstraction root_abs = pbs.state.is_decision() ? base_abstraction(pbs.state) : ActionAbstraction{};
  // A trace of every hand keeps zero-belief hands in the tree so they get
  // counterfactual values too; their regrets ignore their own reach.
  PublicBeliefState floored = pbs;
  for (auto& b : floored.beliefs) {
    for (size_t h = 0; h < b.size(); ++h) {
      if (static_cast<int>(h) != pbs.state.board) b[h] = (1.0 - kBeliefFloor) * b[h] + kBeliefFloor / b.size();
    }
    normalize_or_uniform(b, pbs.state.board);
  }
  const SubgameTree tree = build_subgame(floored, root_abs, nonroot, DepthRule{0});
  return solve(tree, params).root_values;
}

PbsValueFn exact_value_fn(const DcfrParams& params, AbstractionPolicy nonroot) {
  return [params, nonroot = std::move(nonroot)](const std::vector<PublicBeliefState>& batch) {
    std::vector<ValueVector> out;
    for (const auto& pbs : batch) out.push_back(exact_values(pbs, params, nonroot));
    return out;
  };
}

}  // namespace rlcfr
