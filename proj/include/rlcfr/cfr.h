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

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rlcfr/game.h"

namespace rlcfr {

struct DcfrParams {
  double alpha = 1.5;
  double beta = 0.0;
  double gamma = 2.0;
  int iterations = 250;
  // Alternating updates: player 1 sees player 0's freshly updated strategy.
  bool alternating = true;
};

// Policy proportional to positive regrets, uniform when none is positive.
std::vector<double> regret_match(const std::vector<double>& regrets);

// Discount applied to an accumulated regret after iteration t.
double dcfr_discount(int t, double regret, const DcfrParams& params);
// Discount applied to the accumulated average-strategy weights after iteration t.
double dcfr_average_discount(int t, const DcfrParams& params);

using Beliefs = std::array<std::vector<double>, 2>;

enum class NodeKind : uint8_t { kDecision, kChance, kTerminal, kLeaf };

struct TreeNode {
  PublicState state;
  std::string key;
  NodeKind kind = NodeKind::kTerminal;
  int parent = -1;
  int depth = 0;
  // Decision: abstract actions in canonical order. Chance: one board card each.
  std::vector<GameAction> actions;
  std::vector<int> children;
  // Decision only, hand-major [h * A + a]; empty when every action is open.
  std::vector<uint8_t> mask;

  int acting() const { return state.acting; }
  bool allowed(int hand, int a) const {
    return mask.empty() || mask[hand * actions.size() + a] != 0;
  }
};

// Public tree over a root belief state. Nodes are stored parents first.
struct SubgameTree {
  GameConfig config;
  int num_hands = 0;
  Beliefs root_beliefs;
  std::vector<TreeNode> nodes;
  std::vector<int> leaves;
  std::vector<int> terminals;

  const TreeNode& root() const { return nodes.front(); }
  // A hand is an infostate of player p at node n when it has prior mass and
  // does not collide with the board.
  bool hand_live(int player, int hand, int node) const;
  std::string infostate(int node, int hand) const;
  int num_infostates() const;
};

// Expansion hooks for build_tree.
struct TreeHooks {
  // Actions at a decision node; must be legal.
  std::function<std::vector<GameAction>(const PublicState&, int depth)> actions;
  // True when a board chance node should be cut and valued by the leaf evaluator.
  std::function<bool(const PublicState&, int rounds_crossed)> cut;
};

SubgameTree build_tree(const PublicState& root, const Beliefs& beliefs, const TreeHooks& hooks);
// Every legal action everywhere, no leaves.
SubgameTree build_full_tree(const GameConfig& config);

// Weight matrix of compatible hand pairs on a board, [h * H + o].
std::vector<double> compat_matrix(int num_hands, int board);

// Per-player infostate values at every leaf (in tree.leaves order), given both
// players' reach-weighted beliefs there (unnormalized). Values are chips for
// the holder of each hand.
using LeafEvaluator =
    std::function<std::vector<Beliefs>(const SubgameTree& tree, const std::vector<Beliefs>& reach)>;

using StrategyProfile = std::map<std::string, std::vector<double>>;

void write_profile(std::ostream& out, const StrategyProfile& profile);
StrategyProfile read_profile(std::istream& in);

struct SubgameSolveResult {
  StrategyProfile average;
  // Running-average infostate values per player, indexed by hand.
  Beliefs root_values;
  // Acting player's root belief value (player 0 at a chance root).
  double root_value = 0.0;
  int root_player = 0;
};

// Flat per-tree bookkeeping shared by the solver and the evaluation passes.
struct TreeLayout {
  explicit TreeLayout(const SubgameTree& tree);
  int num_hands = 0;
  // Start of each decision node's [h * A + a] block in flat tables, -1 otherwise.
  std::vector<int64_t> offset;
  int64_t table_size = 0;
  // Terminal or leaf slot per node, -1 otherwise.
  std::vector<int> slot;
  // Player-0 payoffs per terminal, [h * H + o], zero on colliding pairs.
  std::vector<double> payoff;
};

class DcfrSolver {
 public:
  DcfrSolver(const SubgameTree& tree, DcfrParams params, LeafEvaluator leaf_eval = {});

  // One full iteration (both players).
  void step();
  // Runs until params.iterations; the callback fires after each iteration.
  void run(const std::function<void(int t, const DcfrSolver&)>& on_iteration = {});

  int iteration() const { return t_; }
  const SubgameTree& tree() const { return tree_; }
  const TreeLayout& layout() const { return layout_; }
  // Flat tables indexed through layout().offset.
  const std::vector<double>& regrets() const { return regrets_; }
  const std::vector<double>& average_weights() const { return avg_; }

  // Current iterate at a decision node, [h * A + a].
  std::vector<double> current_policy(int node) const;
  std::vector<double> average_policy(int node) const;
  StrategyProfile average_strategy() const;
  StrategyProfile current_strategy() const;
  SubgameSolveResult result() const;
  // Both players' reach-weighted beliefs at every node under the current iterate.
  std::vector<Beliefs> current_reach() const;

  int64_t nodes_touched() const { return nodes_touched_; }

 private:
  void refresh_policy();
  void evaluate_leaves();
  void update(int player);

  const SubgameTree& tree_;
  DcfrParams params_;
  LeafEvaluator leaf_eval_;
  TreeLayout layout_;
  int t_ = 0;
  std::vector<double> regrets_;
  std::vector<double> avg_;
  std::vector<double> policy_;
  std::vector<double> reach_;
  std::vector<double> cfv_;
  std::vector<double> leaf_values_;
  Beliefs value_sum_;
  int64_t nodes_touched_ = 0;
};

SubgameSolveResult solve(const SubgameTree& tree, const DcfrParams& params,
                         const LeafEvaluator& leaf_eval = {});

// Root infostate values of both players when both follow `profile`.
// Trees with leaves need an evaluator.
Beliefs profile_values(const SubgameTree& tree, const StrategyProfile& profile,
                       const LeafEvaluator& leaf_eval = {});
// Belief-weighted root value of player p from per-hand infostate values.
double belief_value(const SubgameTree& tree, int player, const std::vector<double>& values);
// Root value for `responder` maximizing against the opponent's part of `profile`.
double best_response_value(const SubgameTree& tree, const StrategyProfile& profile, int responder);
// (expl_p0, expl_p1): what each player's strategy loses to a best responder.
std::pair<double, double> exploitability(const SubgameTree& tree, const StrategyProfile& profile);

}  // namespace rlcfr
