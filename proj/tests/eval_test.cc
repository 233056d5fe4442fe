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

#include <gtest/gtest.h>

#include <sstream>

#include "rlcfr/eval.h"
#include "util.h"

namespace rlcfr {
namespace {

using testing::code_of;
using A = GameAction;

Agent make_agent(AgentKind kind, const GameConfig& game, int iterations = 300) {
  AgentSpec spec;
  spec.kind = kind;
  spec.params.iterations = iterations;
  AgentResources res;
  res.train.game = game;
  return Agent(spec, res);
}

TEST(AgentKind, NamesRoundTrip) {
  for (auto k : {AgentKind::kRlcfr, AgentKind::kBaseFixed, AgentKind::kMulAction, AgentKind::kFineGrain,
                 AgentKind::kUniform, AgentKind::kExactNash}) {
    EXPECT_EQ(parse_agent_kind(agent_kind_name(k)), k);
  }
  EXPECT_EQ(code_of([] { parse_agent_kind("bogus"); }), ErrorCode::kInvalidArgument);
  // The learned agent needs its networks.
  EXPECT_EQ(code_of([] { make_agent(AgentKind::kRlcfr, GameConfig::kuhn()); }), ErrorCode::kInvalidArgument);
}

TEST(Match, SelfPlayIsExactlyEven) {
  const auto game = GameConfig::kuhn();
  Agent a = make_agent(AgentKind::kBaseFixed, game), b = make_agent(AgentKind::kBaseFixed, game);
  const auto r = play_match(a, b, game, 400, 9);
  EXPECT_EQ(r.n_hands, 400);
  EXPECT_EQ(r.win_rate, 0.0);
  EXPECT_EQ(r.se, 0.0);
}

TEST(Match, SwappingAgentsNegates) {
  const auto game = GameConfig::kuhn();
  Agent a = make_agent(AgentKind::kUniform, game), b = make_agent(AgentKind::kBaseFixed, game);
  const auto ab = play_match(a, b, game, 300, 4);
  const auto ba = play_match(b, a, game, 300, 4);
  EXPECT_NEAR(ab.win_rate, -ba.win_rate, 1e-9);
  EXPECT_NEAR(ab.se, ba.se, 1e-9);
}

TEST(Match, EmptyAndSingleGroup) {
  const auto game = GameConfig::kuhn();
  Agent a = make_agent(AgentKind::kUniform, game), b = make_agent(AgentKind::kUniform, game);
  const auto none = play_match(a, b, game, 0, 1);
  EXPECT_EQ(none.n_hands, 0);
  EXPECT_FALSE(none.se_defined);
  EXPECT_TRUE(none.ledger.empty());
  EXPECT_FALSE(play_match(a, b, game, 2, 1).se_defined);
  EXPECT_TRUE(play_match(a, b, game, 4, 1).se_defined);
  MatchOptions solo;
  solo.mirrored = false;
  EXPECT_FALSE(play_match(a, b, game, 1, 1, solo).se_defined);
}

TEST(Match, NashBeatsUniformOnKuhn) {
  const auto game = GameConfig::kuhn();
  AgentSpec spec;
  spec.kind = AgentKind::kExactNash;
  spec.nash_tolerance = 1e-4;
  AgentResources res;
  res.train.game = game;
  Agent nash(spec, res);
  Agent uniform = make_agent(AgentKind::kUniform, game);
  const auto r = play_match(nash, uniform, game, 6000, 2);
  EXPECT_GT(r.win_rate, 2.0 * r.se);
}

TEST(Match, MirroringReducesVariance) {
  const auto game = GameConfig::kuhn();
  Agent a = make_agent(AgentKind::kBaseFixed, game), b = make_agent(AgentKind::kUniform, game);
  MatchOptions plain;
  plain.mirrored = false;
  const auto m = play_match(a, b, game, 4000, 3);
  const auto u = play_match(a, b, game, 4000, 3, plain);
  EXPECT_LE(m.se, u.se);
}

TEST(Ledger, ReplaysToRecordedNets) {
  const auto game = GameConfig::nl_leduc(4);
  AgentResources res;
  res.train.game = game;
  res.train.value_hidden = {8};
  // Any value net will do; only bookkeeping is under test.
  res.value_net = std::make_shared<const Mlp>(Mlp::initialized(value_net_spec(res.train), 1));
  AgentSpec fine;
  fine.kind = AgentKind::kFineGrain;
  fine.params.iterations = 40;
  Agent a = make_agent(AgentKind::kUniform, game);
  Agent b(fine, res);
  std::ostringstream ledger;
  MatchOptions opt;
  opt.ledger = &ledger;
  const auto r = play_match(a, b, game, 20, 5, opt);
  std::istringstream in(ledger.str());
  std::string line;
  int n = 0;
  double a_total = 0.0;
  while (std::getline(in, line)) {
    const auto rec = parse_hand(line);
    EXPECT_EQ(format_hand(rec), line);
    EXPECT_EQ(replay_net(game, rec), rec.net);
    EXPECT_EQ(rec.net[0], -rec.net[1]);
    a_total += rec.net[rec.seats[0] == 0 ? 0 : 1];
    ++n;
  }
  EXPECT_EQ(n, 20);
  EXPECT_NEAR(a_total / 20 * 1000.0 / game.ante, r.win_rate, 1e-9);
}

PublicState round_two_pot_four() {
  PublicState s = initial_public_state(GameConfig::nl_leduc());
  s = apply(apply(s, A::bet(1)), A::check_call());
  return apply(s, A::chance(0));
}

TEST(RoundOff, LogSpace) {
  const auto s = round_two_pot_four();
  const ActionAbstraction abs{A::check_call(), A::bet(2), A::bet(8), A::all_in()};
  EXPECT_EQ(round_off_tree(A::bet(6), abs, s), A::bet(8));
  // 4 is the log-midpoint of 2 and 8: ties go to the smaller bet.
  EXPECT_EQ(round_off_tree(A::bet(4), abs, s), A::bet(2));
  EXPECT_EQ(round_off_tree(A::bet(5), abs, s), A::bet(8));
  EXPECT_EQ(round_off_tree(A::bet(2), abs, s), A::bet(2));
  EXPECT_EQ(round_off_tree(A::bet(17), abs, s), A::all_in());
  EXPECT_EQ(round_off_tree(A::bet(3), {A::check_call()}, s), A::check_call());
  EXPECT_EQ(code_of([&] { round_off_tree(A::bet(3), {}, s); }), ErrorCode::kEmptyAbstraction);
}

TEST(Exploitability, NashUniformAndBase) {
  const auto game = GameConfig::nl_leduc(4);
  const auto states = sample_round2_states(game, 3, 11, DcfrParams{});
  ASSERT_EQ(states.size(), 3u);
  for (const auto& s : states) {
    EXPECT_EQ(s.state.round, 1);
    EXPECT_TRUE(s.state.is_decision());
  }
  AgentSpec nash_spec;
  nash_spec.kind = AgentKind::kExactNash;
  AgentResources res;
  res.train.game = game;
  const Agent nash(nash_spec, res);
  const auto ne = evaluate_exploitability(nash, states);
  for (double e : ne.per_state) EXPECT_LE(e, 1e-6);
  const auto ue = evaluate_exploitability(make_agent(AgentKind::kUniform, game), states);
  const auto de = evaluate_exploitability(make_agent(AgentKind::kBaseFixed, game, 200), states);
  for (size_t i = 0; i < states.size(); ++i) {
    EXPECT_GE(de.per_state[i], -1e-9);
    EXPECT_LT(de.per_state[i], ue.per_state[i]);
  }
  EXPECT_EQ(code_of([] { sample_round2_states(GameConfig::kuhn(), 1, 1, DcfrParams{}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Agent, DecisionsAreMemoized) {
  const auto game = GameConfig::kuhn();
  Agent a = make_agent(AgentKind::kBaseFixed, game, 50);
  const auto pbs = initial_pbs(game);
  const auto* first = &a.decide(pbs);
  EXPECT_EQ(&a.decide(pbs), first);
  EXPECT_EQ(a.cache_size(), 1u);
  EXPECT_EQ(a.root_abstraction(pbs), base_abstraction(pbs.state));
}

}  // namespace
}  // namespace rlcfr
