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

#include <cmath>
#include <sstream>

#include "oracles/history.h"
#include "oracles/lp.h"
#include "rlcfr/cfr.h"
#include "rlcfr/eval.h"
#include "util.h"

namespace rlcfr {
namespace {

using testing::code_of;
using testing::deal;

constexpr int kJ = 0;
constexpr int kQ = 1;
constexpr int kK = 2;

std::string toy_p1_j() { return infostate_key(deal(GameConfig::toy(), kJ, kQ), 0); }
std::string toy_p1_k() { return "p0:K" + toy_p1_j().substr(4); }
std::string toy_p2() { return infostate_key(deal(GameConfig::toy(), kK, kQ), 1); }

TEST(RegretMatch, Examples) {
  const auto u = regret_match({0, 0, 0});
  for (double p : u) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  EXPECT_EQ(regret_match({3, -2, 1}), (std::vector<double>{0.75, 0.0, 0.25}));
  EXPECT_EQ(regret_match({-5, -1}), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(code_of([] { regret_match({}); }), ErrorCode::kEmptyActions);
}

TEST(Dcfr, Discounts) {
  const DcfrParams p;
  EXPECT_DOUBLE_EQ(dcfr_discount(1, 1.0, p), 0.5);
  EXPECT_DOUBLE_EQ(dcfr_discount(1, -1.0, p), -0.5);
  EXPECT_DOUBLE_EQ(dcfr_discount(4, 2.0, p), 2.0 * 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(dcfr_discount(4, -2.0, p), -1.0);
  EXPECT_DOUBLE_EQ(dcfr_average_discount(3, p), 0.5625);
}

TEST(Dcfr, ToyEquilibrium) {
  const auto tree = build_full_tree(GameConfig::toy());
  DcfrParams p;
  p.iterations = 1000;
  const auto r = solve(tree, p);
  EXPECT_NEAR(belief_value(tree, 1, r.root_values[1]), -0.5, 0.01);
  EXPECT_NEAR(r.average.at(toy_p1_j())[1], 0.5, 0.02);
  EXPECT_NEAR(r.average.at(toy_p2())[1], 0.5, 0.02);
  EXPECT_NEAR(r.root_values[0][kK], 2.0, 0.02);
  EXPECT_NEAR(r.root_values[0][kJ], -1.0, 0.02);
}

TEST(Dcfr, SmallGamesMatchSequenceFormValue) {
  for (const auto& cfg : {GameConfig::toy(), GameConfig::kuhn()}) {
    const double lp = oracle::sequence_form_value(cfg);
    const auto tree = build_full_tree(cfg);
    DcfrParams p;
    p.iterations = 4000;
    const auto r = solve(tree, p);
    const double v = oracle::expected_value(GameState::initial(cfg), r.average);
    EXPECT_NEAR(v, lp, 1e-3) << game_kind_name(cfg.kind);
  }
  EXPECT_NEAR(oracle::sequence_form_value(GameConfig::kuhn()), -1.0 / 18.0, 1e-9);
  EXPECT_NEAR(oracle::sequence_form_value(GameConfig::toy()), 0.5, 1e-9);
}

TEST(Dcfr, CurrentIterateIsADistribution) {
  const auto tree = build_full_tree(GameConfig::kuhn());
  DcfrParams p;
  p.iterations = 50;
  DcfrSolver solver(tree, p);
  solver.run([&](int, const DcfrSolver& s) {
    for (size_t n = 0; n < tree.nodes.size(); ++n) {
      if (tree.nodes[n].kind != NodeKind::kDecision) continue;
      const auto pol = s.current_policy(n);
      const size_t na = tree.nodes[n].actions.size();
      for (int h = 0; h < tree.num_hands; ++h) {
        if (!tree.hand_live(tree.nodes[n].acting(), h, n)) continue;
        double sum = 0.0;
        for (size_t a = 0; a < na; ++a) {
          EXPECT_GE(pol[h * na + a], 0.0);
          sum += pol[h * na + a];
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  });
  for (double w : solver.average_weights()) EXPECT_GE(w, 0.0);
}

TEST(Dcfr, Deterministic) {
  const auto tree = build_full_tree(GameConfig::nl_leduc(5));
  DcfrParams p;
  p.iterations = 40;
  DcfrSolver a(tree, p), b(tree, p);
  a.run();
  b.run();
  EXPECT_EQ(a.regrets(), b.regrets());
  EXPECT_EQ(a.average_weights(), b.average_weights());
}

double max_regret_per_t(const SubgameTree& tree, int iters) {
  DcfrParams p;
  p.iterations = iters;
  DcfrSolver s(tree, p);
  s.run();
  double m = 0.0;
  for (double r : s.regrets()) m = std::max(m, r);
  return m / iters;
}

TEST(Dcfr, RegretShrinksLikeInverseSqrt) {
  const auto tree = build_full_tree(GameConfig::kuhn());
  const double r100 = max_regret_per_t(tree, 100);
  const double r400 = max_regret_per_t(tree, 400);
  const double r1600 = max_regret_per_t(tree, 1600);
  EXPECT_LT(r400, r100);
  EXPECT_LT(r1600, r400);
  // Constant fitted on the first point, with headroom.
  const double c = 2.0 * r100 * std::sqrt(100.0);
  EXPECT_LT(r400, c / std::sqrt(400.0));
  EXPECT_LT(r1600, c / std::sqrt(1600.0));
}

TEST(BestResponse, ToyAlwaysAllIn) {
  const auto tree = build_full_tree(GameConfig::toy());
  StrategyProfile prof{{toy_p1_j(), {0.0, 1.0}}, {toy_p1_k(), {0.0, 1.0}}, {toy_p2(), {0.5, 0.5}}};
  EXPECT_NEAR(best_response_value(tree, prof, 1), 0.0, 1e-12);
}

TEST(BestResponse, KuhnUniformMatchesEnumeration) {
  const auto cfg = GameConfig::kuhn();
  const auto tree = build_full_tree(cfg);
  const auto prof = uniform_profile(tree);
  for (int p = 0; p < 2; ++p) {
    EXPECT_NEAR(best_response_value(tree, prof, p), oracle::history_best_response(cfg, prof, p), 1e-12);
  }
  const double u0 = oracle::expected_value(GameState::initial(cfg), prof);
  const auto [e0, e1] = exploitability(tree, prof);
  EXPECT_NEAR(e0, u0 + oracle::history_best_response(cfg, prof, 1), 1e-12);
  EXPECT_NEAR(e1, -u0 + oracle::history_best_response(cfg, prof, 0), 1e-12);
  EXPECT_GT(e0 + e1, 0.1);
}

TEST(BestResponse, LeducMatchesEnumeration) {
  const auto cfg = GameConfig::nl_leduc(4);
  const auto tree = build_full_tree(cfg);
  DcfrParams p;
  p.iterations = 30;
  const auto prof = solve(tree, p).average;
  for (int q = 0; q < 2; ++q) {
    EXPECT_NEAR(best_response_value(tree, prof, q), oracle::history_best_response(cfg, prof, q), 1e-10);
  }
  const auto vals = profile_values(tree, prof);
  EXPECT_NEAR(belief_value(tree, 0, vals[0]), oracle::expected_value(GameState::initial(cfg), prof), 1e-10);
}

TEST(BestResponse, MissingInfostate) {
  const auto tree = build_full_tree(GameConfig::toy());
  StrategyProfile prof{{toy_p2(), {0.5, 0.5}}};
  EXPECT_EQ(code_of([&] { best_response_value(tree, prof, 1); }), ErrorCode::kIncompleteProfile);
}

TEST(Exploitability, ExactToyNash) {
  const auto tree = build_full_tree(GameConfig::toy());
  StrategyProfile nash{{toy_p1_j(), {0.5, 0.5}}, {toy_p1_k(), {0.0, 1.0}}, {toy_p2(), {0.5, 0.5}}};
  const auto [e0, e1] = exploitability(tree, nash);
  EXPECT_LE(std::abs(e0), 1e-6);
  EXPECT_LE(std::abs(e1), 1e-6);
}

TEST(Exploitability, NonNegativeAndShrinking) {
  const auto tree = build_full_tree(GameConfig::kuhn());
  DcfrParams p;
  p.iterations = 100;
  const auto [a0, a1] = exploitability(tree, solve(tree, p).average);
  p.iterations = 1000;
  const auto [b0, b1] = exploitability(tree, solve(tree, p).average);
  EXPECT_GE(a0, -1e-9);
  EXPECT_GE(a1, -1e-9);
  EXPECT_GE(b0 + b1, -1e-9);
  EXPECT_LT(b0 + b1, a0 + a1);
}

TEST(Profile, TextRoundTrip) {
  const auto tree = build_full_tree(GameConfig::kuhn());
  DcfrParams p;
  p.iterations = 10;
  const auto prof = solve(tree, p).average;
  std::stringstream ss;
  write_profile(ss, prof);
  const std::string text = ss.str();
  EXPECT_NE(text.find('\t'), std::string::npos);
  ss.seekg(0);
  const auto back = read_profile(ss);
  ASSERT_EQ(back.size(), prof.size());
  for (const auto& [k, v] : prof) {
    ASSERT_EQ(back.at(k).size(), v.size());
    for (size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.at(k)[i], v[i]);
  }
}

TEST(Solve, LeavesWithoutEvaluatorFail) {
  PublicState root = initial_public_state(GameConfig::nl_leduc(6));
  TreeHooks hooks;
  hooks.actions = [](const PublicState& s, int) { return legal_actions(s); };
  hooks.cut = [](const PublicState&, int) { return true; };
  const auto tree = build_tree(root, prior_beliefs(root.config), hooks);
  ASSERT_FALSE(tree.leaves.empty());
  EXPECT_EQ(code_of([&] { solve(tree, DcfrParams{}); }), ErrorCode::kLeafEvalFailed);
  LeafEvaluator bad = [](const SubgameTree&, const std::vector<Beliefs>&) -> std::vector<Beliefs> {
    throw std::runtime_error("boom");
  };
  EXPECT_EQ(code_of([&] { solve(tree, DcfrParams{}, bad); }), ErrorCode::kLeafEvalFailed);
}

}  // namespace
}  // namespace rlcfr
