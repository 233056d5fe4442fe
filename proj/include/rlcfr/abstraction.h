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

#include <functional>
#include <optional>
#include <vector>

#include "rlcfr/game.h"

namespace rlcfr {

// Ordered set of actions at one decision point, canonical order, no duplicates.
using ActionAbstraction = std::vector<GameAction>;

// Abstraction for a non-root node; depth counts betting actions since the
// root or the last board reveal.
using AbstractionPolicy = std::function<ActionAbstraction(const PublicState&, int depth)>;

void canonicalize(ActionAbstraction& abstraction);

// legal ∩ {FOLD, CHECK_CALL, ALL_IN}
ActionAbstraction always_set(const PublicState& state);

// Chips put in for a raise of `fraction` times the pot after calling.
double pot_fraction_amount(const PublicState& state, double fraction);

// Nearest legal raise to `raw` chips put in; ties go to the larger amount.
// The top of the range is ALL_IN. Empty when no raise is legal.
std::optional<GameAction> clip_to_legal(double raw, const PublicState& state);

ActionAbstraction fraction_abstraction(const PublicState& state, const std::vector<double>& fractions);
ActionAbstraction base_abstraction(const PublicState& state);
ActionAbstraction fine_grain_abstraction(const PublicState& state);
// Deep-node set used below the root's children.
ActionAbstraction deep_abstraction(const PublicState& state);

inline const std::vector<double> kBaseFractions{0.5, 1.0, 2.0};
inline const std::vector<double> kFineFractions{0.25, 0.5, 0.75, 1.0, 1.25, 2.0};
inline const std::vector<double> kDeepFractions{0.8};

// Base abstraction for the root's children (and right after a board reveal),
// deep set further down.
AbstractionPolicy base_nonroot_policy();
// Every legal action at every node.
AbstractionPolicy full_legal_policy();
// `near` decides nodes at depth <= 1, the deep set the rest.
AbstractionPolicy layered_policy(AbstractionPolicy near);

bool is_subset(const ActionAbstraction& small, const ActionAbstraction& big);

}  // namespace rlcfr
