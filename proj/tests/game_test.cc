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

#include <functional>
#include <map>
#include <random>
#include <set>

#include "rlcfr/error.h"
#include "rlcfr/game.h"
#include "util.h"

namespace rlcfr {
namespace {

using testing::code_of;
using testing::deal;

void walk(const GameState& s, const std::function<void(const GameState&)>& visit) {
  visit(s);
  if (s.is_terminal()) return;
  for (const auto& a : legal_actions(s)) walk(apply(s, a), visit);
}

// Betting rules written out from the game definition: replays the public
// history to find the largest raise increment of the current round.
std::vector<GameAction> rules_oracle(const PublicState& s) {
  const int ante = s.config.ante;
  const int stack = s.config.stack;
  std::array<int, 2> c{ante, ante};
  int me = 0;
  int incr = 0;
  for (const auto& a : s.history) {
    if (a.kind == ActionKind::kChanceOutcome) {
      me = 0;
      incr = 0;
      continue;
    }
    const int owe = c[1 - me] - c[me];
    if (a.kind == ActionKind::kCheckCall) c[me] += owe;
    if (a.kind == ActionKind::kBetRaise) {
      c[me] += a.amount;
      incr = std::max(incr, a.amount - owe);
    }
    if (a.kind == ActionKind::kAllIn) {
      incr = std::max(incr, stack - c[me] - owe);
      c[me] = stack;
    }
    me = 1 - me;
  }
  EXPECT_EQ(me, s.acting);
  EXPECT_EQ(c, s.contrib);
  const int owe = c[1 - me] - c[me];
  const int behind = stack - c[me];
  std::vector<GameAction> out;
  if (owe > 0) out.push_back(GameAction::fold());
  out.push_back(GameAction::check_call());
  if (behind > owe && c[1 - me] < stack) {
    for (int amt = owe + std::max(incr, ante); amt < behind; ++amt) out.push_back(GameAction::bet(amt));
    out.push_back(GameAction::all_in());
  }
  return out;
}

TEST(GameTest, ToyRootActions) {
  const auto s = deal(GameConfig::toy(), 0, 1);
  EXPECT_EQ(s.acting(), 0);
  EXPECT_EQ(legal_actions(s), (std::vector<GameAction>{GameAction::check_call(), GameAction::all_in()}));
}

TEST(GameTest, ToyFacingAllIn) {
  const auto s = apply(deal(GameConfig::toy(), 0, 1), GameAction::all_in());
  EXPECT_EQ(s.acting(), 1);
  EXPECT_EQ(legal_actions(s), (std::vector<GameAction>{GameAction::fold(), GameAction::check_call()}));
}

TEST(GameTest, ToyKingIsForcedAllIn) {
  const auto s = deal(GameConfig::toy(), 2, 1);
  EXPECT_EQ(s.acting(), 1);
  ASSERT_EQ(s.action_history().size(), 2u);
  EXPECT_EQ(s.action_history().back(), GameAction::all_in());
  EXPECT_EQ(s.pub().contrib[0], 3);
}

TEST(GameTest, LeducOpeningBetRange) {
  // Pot 4 with 18 behind each: ante 2 sets the minimum raise.
  const auto s = deal(GameConfig::nl_leduc(20, 2), 0, 2);
  EXPECT_EQ(s.pub().pot(), 4);
  EXPECT_EQ(s.pub().stacks[0], 18);
  std::vector<GameAction> want{GameAction::check_call()};
  for (int b = 2; b <= 17; ++b) want.push_back(GameAction::bet(b));
  want.push_back(GameAction::all_in());
  EXPECT_EQ(legal_actions(s), want);
  EXPECT_EQ(legal_actions(s), rules_oracle(s.pub()));
}

TEST(GameTest, LeducLegalActionsMatchRulesOracleOnRandomWalks) {
  std::mt19937_64 rng(5);
  for (int walk_i = 0; walk_i < 300; ++walk_i) {
    GameState s = GameState::initial(GameConfig::nl_leduc(walk_i % 2 ? 20 : 9));
    while (!s.is_terminal()) {
      std::vector<GameAction> acts;
      if (s.is_chance()) {
        for (const auto& [a, p] : chance_outcomes(s)) acts.push_back(a);
      } else {
        acts = legal_actions(s);
        EXPECT_EQ(acts, rules_oracle(s.pub()));
        const auto& l = acts;
        for (size_t i = 1; i < l.size(); ++i) EXPECT_LT(l[i - 1], l[i]);
      }
      s = apply(s, acts[std::uniform_int_distribution<size_t>(0, acts.size() - 1)(rng)]);
      EXPECT_EQ(s.pub().total_chips(), 2 * s.config().stack);
    }
    EXPECT_EQ(terminal_utility(s, 0) + terminal_utility(s, 1), 0.0);
  }
}

TEST(GameTest, CheckLeavesPotUnchanged) {
  const auto s = deal(GameConfig::nl_leduc(), 0, 2);
  const auto t = apply(s, GameAction::check_call());
  EXPECT_EQ(t.pub().pot(), s.pub().pot());
  EXPECT_EQ(t.pub().stacks, s.pub().stacks);
}

TEST(GameTest, KuhnBetFold) {
  auto s = deal(GameConfig::kuhn(), 0, 1);
  s = apply(s, GameAction::bet(1));
  EXPECT_EQ(s.pub().contrib[0], 2);
  s = apply(s, GameAction::fold());
  ASSERT_TRUE(s.is_terminal());
  EXPECT_EQ(terminal_utility(s, 0), 1.0);
  EXPECT_EQ(terminal_utility(s, 1), -1.0);
}

TEST(GameTest, ToyPayoffs) {
  auto k = apply(deal(GameConfig::toy(), 2, 1), GameAction::check_call());
  ASSERT_TRUE(k.is_terminal());
  EXPECT_EQ(terminal_utility(k, 0), 3.0);
  auto j = apply(deal(GameConfig::toy(), 0, 1), GameAction::check_call());
  ASSERT_TRUE(j.is_terminal());
  EXPECT_EQ(terminal_utility(j, 0), -1.0);
  EXPECT_EQ(terminal_utility(j, 1), 1.0);
}

TEST(GameTest, ChanceOutcomes) {
  const auto toy = chance_outcomes(GameState::initial(GameConfig::toy()));
  ASSERT_EQ(toy.size(), 2u);
  EXPECT_EQ(toy[0].first, GameAction::chance(0));
  EXPECT_EQ(toy[1].first, GameAction::chance(2));
  EXPECT_EQ(toy[0].second, 0.5);
  EXPECT_EQ(toy[1].second, 0.5);
  const auto kuhn = chance_outcomes(GameState::initial(GameConfig::kuhn()));
  ASSERT_EQ(kuhn.size(), 6u);
  double total = 0.0;
  for (const auto& [a, p] : kuhn) {
    EXPECT_NEAR(p, 1.0 / 6.0, 1e-15);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  auto s = apply(apply(deal(GameConfig::nl_leduc(), 0, 2), GameAction::check_call()), GameAction::check_call());
  ASSERT_TRUE(s.is_chance());
  const auto board = chance_outcomes(s);
  EXPECT_EQ(board.size(), 4u);
  total = 0.0;
  for (const auto& [a, p] : board) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(GameTest, Errors) {
  auto term = apply(deal(GameConfig::toy(), 0, 1), GameAction::check_call());
  EXPECT_EQ(code_of([&] { legal_actions(term); }), ErrorCode::kTerminalState);
  EXPECT_EQ(code_of([&] { chance_outcomes(term); }), ErrorCode::kNotChance);
  auto live = deal(GameConfig::toy(), 0, 1);
  EXPECT_EQ(code_of([&] { terminal_utility(live, 0); }), ErrorCode::kNotTerminal);
  EXPECT_EQ(code_of([&] { apply(live, GameAction::fold()); }), ErrorCode::kIllegalAction);
  EXPECT_EQ(code_of([&] { apply(live, GameAction::bet(1)); }), ErrorCode::kIllegalAction);
}

TEST(GameTest, ToyInfostateMergesJAndK) {
  const auto j = apply(deal(GameConfig::toy(), 0, 1), GameAction::all_in());
  const auto k = deal(GameConfig::toy(), 2, 1);
  EXPECT_EQ(infostate_key(j, 1), infostate_key(k, 1));
  EXPECT_NE(infostate_key(j, 0), infostate_key(k, 0));
  EXPECT_EQ(public_key(j), public_key(k));
  EXPECT_EQ(infostate_key(j, 1), infostate_key(j, 1));
}

TEST(GameTest, PublicKeyIgnoresHoleCards) {
  auto a = apply(deal(GameConfig::nl_leduc(), 0, 2), GameAction::bet(3));
  auto b = apply(deal(GameConfig::nl_leduc(), 5, 1), GameAction::bet(3));
  EXPECT_EQ(public_key(a), public_key(b));
  EXPECT_EQ(parse_public_key(public_key(a.pub())), a.pub());
}

TEST(GameTest, ReplayReconstructsState) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    GameState s = GameState::initial(GameConfig::nl_leduc());
    while (!s.is_terminal()) {
      const auto acts = legal_actions(s);
      s = apply(s, acts[std::uniform_int_distribution<size_t>(0, acts.size() - 1)(rng)]);
    }
    EXPECT_EQ(replay(s.config(), s.action_history()), s);
  }
}

TEST(GameTest, ActionTokensRoundTrip) {
  for (const auto& a : {GameAction::fold(), GameAction::check_call(), GameAction::bet(7), GameAction::all_in(),
                        GameAction::chance(13)}) {
    EXPECT_EQ(parse_action(to_string(a)), a);
  }
}

class SmallGames : public ::testing::TestWithParam<GameConfig> {};

TEST_P(SmallGames, ConservationAndZeroSum) {
  const auto cfg = GetParam();
  int terminals = 0;
  walk(GameState::initial(cfg), [&](const GameState& s) {
    EXPECT_EQ(s.pub().total_chips(), 2 * cfg.stack);
    if (s.is_terminal()) {
      ++terminals;
      EXPECT_EQ(terminal_utility(s, 0) + terminal_utility(s, 1), 0.0);
    }
  });
  EXPECT_GT(terminals, 0);
}

TEST_P(SmallGames, PerfectRecallAndPublicPartition) {
  const auto cfg = GetParam();
  // Each infostate must have one predecessor (own previous infostate, action).
  std::map<std::string, std::string> parent;
  std::map<std::pair<std::string, std::string>, std::string> pub_of;
  std::function<void(const GameState&, std::array<std::string, 2>)> go = [&](const GameState& s,
                                                                             std::array<std::string, 2> last) {
    if (s.is_terminal()) return;
    if (s.is_chance()) {
      for (const auto& [a, p] : chance_outcomes(s)) go(apply(s, a), last);
      return;
    }
    const int p = s.acting();
    const auto key = infostate_key(s, p);
    auto [it, fresh] = parent.emplace(key, last[p]);
    if (!fresh) EXPECT_EQ(it->second, last[p]) << key;
    auto [pit, pfresh] = pub_of.emplace(std::make_pair(infostate_key(s, 0), infostate_key(s, 1)), public_key(s));
    if (!pfresh) EXPECT_EQ(pit->second, public_key(s));
    for (const auto& a : legal_actions(s)) {
      auto next = last;
      next[p] = key + "/" + to_string(a);
      go(apply(s, a), next);
    }
  };
  go(GameState::initial(cfg), {"", ""});
  EXPECT_FALSE(parent.empty());
}

INSTANTIATE_TEST_SUITE_P(All, SmallGames,
                         ::testing::Values(GameConfig::toy(), GameConfig::kuhn(), GameConfig::nl_leduc(4)),
                         [](const ::testing::TestParamInfo<GameConfig>& info) {
                           std::string name = game_kind_name(info.param.kind);
                           std::erase(name, '-');
                           return name;
                         });

}  // namespace
}  // namespace rlcfr
