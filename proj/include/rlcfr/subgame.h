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

#include <optional>
#include <random>

#include "rlcfr/abstraction.h"
#include "rlcfr/cfr.h"

namespace rlcfr {

using Rng = std::mt19937_64;

struct PublicBeliefState {
  PublicState state;
  // Per player, dense over card ids.
  Beliefs beliefs;

  bool operator==(const PublicBeliefState&) const = default;
};

PublicBeliefState initial_pbs(const GameConfig& config);
// Throws INVALID_ARGUMENT unless each player's beliefs are a distribution that
// puts no mass on the board card.
void check_pbs(const PublicBeliefState& pbs);

// Probability of each hand pair under the common-knowledge joint.
std::vector<double> joint_weights(const Beliefs& beliefs, int board);
// Marginal of the joint for one player, summing to 1 (all zero if the joint is empty).
std::vector<double> joint_marginal(const Beliefs& beliefs, int board, int player);

// Per-player infostate values at a PBS, chips for the holder of each hand.
using ValueVector = Beliefs;

struct PbsSample {
  PublicBeliefState pbs;
  ValueVector values;
};

// Values at a batch of leaf PBSs (board reveals not yet dealt).
using PbsValueFn = std::function<std::vector<ValueVector>(const std::vector<PublicBeliefState>&)>;

struct DepthRule {
  // Betting rounds a subgame may cross before cutting at a board reveal.
  // Zero or less: unlimited.
  int max_rounds = 1;
};

SubgameTree build_subgame(const PublicBeliefState& root, const ActionAbstraction& root_abstraction,
                          const AbstractionPolicy& nonroot, const DepthRule& depth);

// Leaf PBS under reach-weighted beliefs; a player with no reach falls back to
// uniform over the cards still possible.
PublicBeliefState leaf_pbs(const SubgameTree& tree, int node, const Beliefs& reach);

LeafEvaluator make_leaf_evaluator(PbsValueFn value_fn);

struct ExploreParams {
  double noise_sigma = 0.15;
  double eta = 0.33;
  double epsilon = 0.25;
  bool perturb = false;
};

struct RebelConfig {
  DcfrParams params;
  AbstractionPolicy nonroot = base_nonroot_policy();
  DepthRule depth;
  PbsValueFn value_fn;
};

struct RebelResult {
  StrategyProfile strategy;
  ActionAbstraction root_abstraction;
  double root_value = 0.0;
  int root_player = 0;
  ValueVector root_values;
  // Empty for value-only solves or when the sampled walk ends at a terminal.
  std::optional<PublicBeliefState> next_pbs;
  PbsSample sample;
};

// Without an rng the solve is value-only: no leaf sampling.
RebelResult rebel_solve(const PublicBeliefState& root, const ActionAbstraction& abstraction,
                        const RebelConfig& config, const ExploreParams& explore, Rng* rng);

// Walks the current iterate from the root to a leaf. With probability
// epsilon picks a uniformly random leaf instead.
std::optional<PublicBeliefState> sample_leaf(const SubgameTree& tree, const std::vector<Beliefs>& reach,
                                             double epsilon, Rng& rng);

// Belief-weighted averaging of suit-isomorphic infostates, then an equal
// constant shift of both players so the joint-weighted total is zero.
ValueVector zero_sum_adjust(const ValueVector& values, const PublicBeliefState& pbs);
// Joint-weighted total of both players' values.
double zero_sum_residual(const ValueVector& values, const PublicBeliefState& pbs);

// Scales the pot by U[0.9, 1.1], rounded half up, floored at both antes.
PublicBeliefState perturb_pbs(const PublicBeliefState& pbs, Rng& rng);

// Bayes update of the acting player's beliefs after `action`. Throws
// ZERO_REACH if no hand takes it; with `fallback` keeps the prior instead.
PublicBeliefState pbs_transition(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                                 const StrategyProfile& profile, const GameAction& action,
                                 bool fallback = false);

// Board reveal at a chance PBS.
std::vector<double> board_distribution(const PublicBeliefState& pbs);
PublicBeliefState reveal_board(const PublicBeliefState& pbs, int card);
PublicBeliefState take_chance(const PublicBeliefState& pbs, Rng& rng);

// Per-hand policy of the acting player read from a profile, [h * A + a].
std::vector<double> hand_policy(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                                const StrategyProfile& profile);

// Exact leaf values: solves the rest of the game below the leaf.
// Belief mixed into every hand before an exact solve.
inline constexpr double kBeliefFloor = 1e-9;

ValueVector exact_values(const PublicBeliefState& pbs, const DcfrParams& params,
                         const AbstractionPolicy& nonroot = base_nonroot_policy());
PbsValueFn exact_value_fn(const DcfrParams& params, AbstractionPolicy nonroot = base_nonroot_policy());

}  // namespace rlcfr
