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

#include "rlcfr/mdp.h"

#include <algorithm>

#include "rlcfr/error.h"

namespace rlcfr {

namespace {

constexpr int kScalarFeatures = 9;

void require_decision(const PublicState& state) {
  if (!state.is_decision()) throw Error(ErrorCode::kNotDecisionPbs, public_key(state));
}

}  // namespace

int feature_size(GameKind kind) { return num_cards(kind) + kScalarFeatures + kActionWindow * kSlotWidth; }

StateFeatures encode_state(const PublicState& state) {
  require_decision(state);
  const double ante = state.config.ante;
  const int n = num_cards(state.config.kind);
  StateFeatures f(feature_size(state.config.kind), 0.0);
  if (state.board >= 0) f[state.board] = 1.0;
  double* x = f.data() + n;
  x[0] = state.pot() / ante;
  x[1] = state.stacks[0] / ante;
  x[2] = state.stacks[1] / ante;
  x[3] = state.contrib[0] / ante;
  x[4] = state.contrib[1] / ante;
  x[5] = state.to_call() / ante;
  x[6] = state.round;
  x[7 + state.acting] = 1.0;

  // Betting actions tagged with their round, newest last.
  std::vector<std::pair<GameAction, int>> acts;
  int round = 0;
  for (const auto& a : state.history) {
    if (a.kind == ActionKind::kChanceOutcome) {
      ++round;
    } else {
      acts.emplace_back(a, round);
    }
  }
  const size_t keep = std::min<size_t>(acts.size(), kActionWindow);
  double* slot = x + kScalarFeatures;
  for (size_t i = acts.size() - keep; i < acts.size(); ++i, slot += kSlotWidth) {
    const auto& [a, r] = acts[i];
    slot[0] = 1.0;
    slot[1 + static_cast<int>(a.kind)] = 1.0;
    slot[5] = a.amount / ante;
    slot[6] = r;
  }
  return f;
}

StateFeatures encode_state(const PublicBeliefState& pbs) { return encode_state(pbs.state); }

ActionAbstraction decode_abstraction(const PublicState& state, const ActionVector& a, double bet_range) {
  require_decision(state);
  if (a.size() % 2 != 0) throw Error(ErrorCode::kDimMismatch, "action vector needs (x, y) pairs");
  ActionAbstraction out = always_set(state);
  for (size_t i = 0; i < a.size(); i += 2) {
    if (a[i + 1] < 0.0) continue;
    const double fraction = 0.5 * bet_range * (a[i] + 1.0);
    if (auto bet = clip_to_legal(pot_fraction_amount(state, fraction), state)) out.push_back(*bet);
  }
  canonicalize(out);
  return out;
}

ActionAbstraction decode_abstraction(const PublicBeliefState& pbs, const ActionVector& a, double bet_range) {
  return decode_abstraction(pbs.state, a, bet_range);
}

double abstraction_gap(const PublicBeliefState& pbs, const ActionAbstraction& abstraction,
                       const ActionAbstraction& reference, const RebelConfig& config) {
  require_decision(pbs.state);
  const ExploreParams off{0.0, 0.0, 0.0, false};
  const double v = rebel_solve(pbs, abstraction, config, off, nullptr).root_value;
  const double ref = rebel_solve(pbs, reference, config, off, nullptr).root_value;
  return (v - ref) / pbs.state.config.ante;
}

RewardResult reward(const PublicBeliefState& pbs, const ActionVector& a, const RebelConfig& config,
                    double bet_range) {
  require_decision(pbs.state);
  const ExploreParams off{0.0, 0.0, 0.0, false};
  RewardResult out;
  out.base = rebel_solve(pbs, base_abstraction(pbs.state), config, off, nullptr);
  const auto mdp_abs = decode_abstraction(pbs.state, a, bet_range);
  // Identical inputs give an identical solve.
  out.mdp = mdp_abs == out.base.root_abstraction ? out.base : rebel_solve(pbs, mdp_abs, config, off, nullptr);
  out.r = (out.mdp.root_value - out.base.root_value) / pbs.state.config.ante;
  return out;
}

MulActionChoice mul_action_select(const PublicBeliefState& pbs, const std::vector<ActionAbstraction>& candidates,
                                  const RebelConfig& config) {
  require_decision(pbs.state);
  if (candidates.empty()) throw Error(ErrorCode::kEmptyAbstraction, "no candidate abstractions");
  const ExploreParams off{0.0, 0.0, 0.0, false};
  MulActionChoice out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto same = std::find(candidates.begin(), candidates.begin() + i, candidates[i]);
    if (same != candidates.begin() + i) {
      out.values.push_back(out.values[same - candidates.begin()]);
      continue;
    }
    auto solved = rebel_solve(pbs, candidates[i], config, off, nullptr);
    out.values.push_back(solved.root_value);
    if (i == 0 || out.values[i] > out.values[out.index]) {
      out.index = static_cast<int>(i);
      out.best = std::move(solved);
    }
  }
  return out;
}

std::vector<ActionAbstraction> mul_action_candidates(const PublicState& state) {
  std::vector<ActionAbstraction> out;
  for (const auto& fractions : kMulActionFractions) out.push_back(fraction_abstraction(state, fractions));
  return out;
}

}  // namespace rlcfr
