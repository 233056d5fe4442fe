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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlcfr/trainer.h"

namespace rlcfr {

enum class AgentKind : uint8_t { kRlcfr, kBaseFixed, kMulAction, kFineGrain, kUniform, kExactNash };

std::string agent_kind_name(AgentKind kind);
AgentKind parse_agent_kind(const std::string& name);

struct AgentSpec {
  AgentKind kind = AgentKind::kBaseFixed;
  DcfrParams params;
  // Inference-time fallback to the base abstraction when the critic
  // predicts a negative reward.
  bool gate = true;
  // EXACT_NASH stops once total exploitability drops below this (antes).
  double nash_tolerance = 1e-8;
  int nash_max_iterations = 200000;
};

// Networks shared by the agents of one match.
struct AgentResources {
  TrainConfig train;
  std::shared_ptr<const Mlp> value_net;
  std::shared_ptr<const Mlp> actor;
  std::shared_ptr<const Mlp> critic;
};

AgentResources load_resources(const TrainConfig& train, const std::string& run_dir);

// One agent decision: the solved root and the policy used below it.
struct AgentSolve {
  ActionAbstraction abstraction;
  StrategyProfile strategy;
  double root_value = 0.0;
};

class Agent {
 public:
  Agent(AgentSpec spec, AgentResources res);

  AgentKind kind() const { return spec_.kind; }
  const AgentSpec& spec() const { return spec_; }
  // Root abstraction this agent would use at a decision PBS.
  ActionAbstraction root_abstraction(const PublicBeliefState& pbs) const;
  AbstractionPolicy nonroot() const;
  // Memoized by PBS.
  const AgentSolve& decide(const PublicBeliefState& pbs);
  // Solve without depth limit (the whole remaining game), used for
  // exploitability on round-two states.
  AgentSolve solve_full(const PublicBeliefState& pbs) const;
  size_t cache_size() const { return cache_.size(); }

 private:
  AgentSolve compute(const PublicBeliefState& pbs) const;
  RebelConfig rebel(int max_rounds) const;

  AgentSpec spec_;
  AgentResources res_;
  PbsValueFn value_fn_;
  std::map<std::string, AgentSolve> cache_;
};

StrategyProfile uniform_profile(const SubgameTree& tree);

// Maps an action outside the abstraction to a member; bets round in
// log-amount space, ties toward the smaller bet.
GameAction round_off_tree(const GameAction& observed, const ActionAbstraction& abstraction,
                          const PublicState& state);

struct HandRecord {
  int64_t hand = 0;
  uint64_t seed = 0;
  // Agent index (0 = a, 1 = b) in each seat.
  std::array<int, 2> seats{0, 1};
  std::vector<GameAction> actions;
  std::array<double, 2> net{0.0, 0.0};
};

std::string format_hand(const HandRecord& record);
HandRecord parse_hand(const std::string& line);
// Net chips per seat obtained by replaying the recorded actions.
std::array<double, 2> replay_net(const GameConfig& game, const HandRecord& record);

struct MatchResult {
  int64_t n_hands = 0;
  // Agent a's mean result in milli-antes per hand.
  double win_rate = 0.0;
  // Standard error over mirrored pairs (over hands when unmirrored).
  double se = 0.0;
  bool se_defined = false;
  std::vector<HandRecord> ledger;
};

struct MatchOptions {
  bool mirrored = true;
  std::ostream* ledger = nullptr;
};

MatchResult play_match(Agent& a, Agent& b, const GameConfig& game, int64_t n_hands, uint64_t seed,
                       const MatchOptions& options = {});

// Round-two decision PBSs reached by playing a base-abstraction blueprint.
std::vector<PublicBeliefState> sample_round2_states(const GameConfig& game, int n_states, uint64_t seed,
                                                    const DcfrParams& blueprint_params);

struct ExploitabilityReport {
  double mean = 0.0;
  double se = 0.0;
  // Total exploitability (both seats) per state, antes.
  std::vector<double> per_state;
};

double state_exploitability(const Agent& agent, const PublicBeliefState& pbs);
ExploitabilityReport evaluate_exploitability(const Agent& agent, const std::vector<PublicBeliefState>& states);
ExploitabilityReport evaluate_exploitability(const Agent& agent, const GameConfig& game, int n_states,
                                             uint64_t seed);

}  // namespace rlcfr
