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

#include "rlcfr/abstraction.h"

#include <algorithm>
#include <cmath>

namespace rlcfr {

void canonicalize(ActionAbstraction& abstraction) {
  std::sort(abstraction.begin(), abstraction.end());
  abstraction.erase(std::unique(abstraction.begin(), abstraction.end()), abstraction.end());
}

ActionAbstraction always_set(const PublicState& state) {
  ActionAbstraction out;
  for (const auto& a : legal_actions(state)) {
    if (a.kind != ActionKind::kBetRaise) out.push_back(a);
  }
  return out;
}

double pot_fraction_amount(const PublicState& state, double fraction) {
  const int to_call = state.to_call();
  return to_call + fraction * (state.pot() + to_call);
}

namespace {

int raise_amount(const PublicState& state, const GameAction& a) {
  return a.kind == ActionKind::kAllIn ? all_in_amount(state) : a.amount;
}

}  // namespace

std::optional<GameAction> clip_to_legal(double raw, const PublicState& state) {
  std::optional<GameAction> best;
  double best_gap = 0.0;
  for (const auto& a : legal_actions(state)) {
    if (!a.is_raise()) continue;
    const double gap = std::abs(raise_amount(state, a) - raw);
    // Candidates ascend, so <= keeps the larger one on a tie.
    if (!best || gap <= best_gap) {
      best = a;
      best_gap = gap;
    }
  }
  return best;
}

ActionAbstraction fraction_abstraction(const PublicState& state, const std::vector<double>& fractions) {
  ActionAbstraction out = always_set(state);
  for (double f : fractions) {
    if (auto a = clip_to_legal(pot_fraction_amount(state, f), state)) out.push_back(*a);
  }
  canonicalize(out);
  return out;
}

ActionAbstraction base_abstraction(const PublicState& state) {
  return fraction_abstraction(state, kBaseFractions);
}

ActionAbstraction fine_grain_abstraction(const PublicState& state) {
  return fraction_abstraction(state, kFineFractions);
}

ActionAbstraction deep_abstraction(const PublicState& state) {
  return fraction_abstraction(state, kDeepFractions);
}

AbstractionPolicy layered_policy(AbstractionPolicy near) {
  return [near = std::move(near)](const PublicState& s, int depth) {
    return depth <= 1 ? near(s, depth) : deep_abstraction(s);
  };
}

AbstractionPolicy base_nonroot_policy() {
  return layered_policy([](const PublicState& s, int) { return base_abstraction(s); });
}

AbstractionPolicy full_legal_policy() {
  return [](const PublicState& s, int) { return legal_actions(s); };
}

bool is_subset(const ActionAbstraction& small, const ActionAbstraction& big) {
  return std::all_of(small.begin(), small.end(), [&](const GameAction& a) {
    return std::find(big.begin(), big.end(), a) != big.end();
  });
}

}  // namespace rlcfr
