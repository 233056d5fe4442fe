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
#include <vector>

#include "rlcfr/subgame.h"

namespace rlcfr {

// Single-step MDP: the critic regresses immediate rewards, so the discount
// never enters a loss.
inline constexpr double kMdpDiscount = 1.0;

inline constexpr int kActionWindow = 8;
// present, FOLD, CHECK_CALL, BET_RAISE, ALL_IN, amount, round
inline constexpr int kSlotWidth = 7;
inline constexpr int kDefaultK = 3;
// Upper end of the optional bet range in pot units.
inline constexpr double kDefaultBetRange = 5.0;

using StateFeatures = std::vector<double>;
using ActionVector = std::vector<double>;

int feature_size(GameKind kind);

// Public information only.
StateFeatures encode_state(const PublicState& state);
StateFeatures encode_state(const PublicBeliefState& pbs);

ActionAbstraction decode_abstraction(const PublicState& state, const ActionVector& a,
                                     double bet_range = kDefaultBetRange);
ActionAbstraction decode_abstraction(const PublicBeliefState& pbs, const ActionVector& a,
                                     double bet_range = kDefaultBetRange);

struct TransitionSample {
  StateFeatures s;
  ActionVector a;
  double r = 0.0;

  bool operator==(const TransitionSample&) const = default;
};

struct RewardResult {
  // Ante-normalized.
  double r = 0.0;
  RebelResult mdp;
  RebelResult base;
};

// Acting player's root value with `abstraction` minus the value with
// `reference`, in antes. Both solves share the config.
double abstraction_gap(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                       const ActionAbstraction& reference, const RebelConfig& config);

RewardResult reward(const PublicBeliefState& pbs, const ActionVector& a, const RebelConfig& config,
                    double bet_range = kDefaultBetRange);

inline const std::vector<std::vector<double>> kMulActionFractions{
    {0.5, 1.0, 2.0}, {0.25, 0.5, 1.0}, {0.33, 0.7, 1.5}};

struct MulActionChoice {
  int index = 0;
  // Acting player's root value per candidate, in chips.
  std::vector<double> values;
  RebelResult best;
};

MulActionChoice mul_action_select(const PublicBeliefState& pbs,
                                  const std::vector<ActionAbstraction>& candidates,
                                  const RebelConfig& config);
std::vector<ActionAbstraction> mul_action_candidates(const PublicState& state);

}  // namespace rlcfr
