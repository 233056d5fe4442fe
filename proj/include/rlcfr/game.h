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
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rlcfr {

// Player ids. Strategic players are 0 and 1.
inline constexpr int kChancePlayer = -1;
inline constexpr int kTerminalPlayer = -2;
inline constexpr int kNumPlayers = 2;

enum class GameKind : uint8_t { kToy, kKuhn, kNlLeduc };

std::string game_kind_name(GameKind kind);
GameKind parse_game_kind(const std::string& name);

enum class ActionKind : uint8_t {
  kFold,
  kCheckCall,
  kBetRaise,
  kAllIn,
  kChanceOutcome,
};

struct GameAction {
  ActionKind kind = ActionKind::kCheckCall;
  // Chips put in by this action (BET_RAISE only).
  int amount = 0;
  // CHANCE_OUTCOME only.
  int outcome_id = 0;

  static GameAction fold() { return {ActionKind::kFold, 0, 0}; }
  static GameAction check_call() { return {ActionKind::kCheckCall, 0, 0}; }
  static GameAction bet(int amount) { return {ActionKind::kBetRaise, amount, 0}; }
  static GameAction all_in() { return {ActionKind::kAllIn, 0, 0}; }
  static GameAction chance(int outcome) {
    return {ActionKind::kChanceOutcome, 0, outcome};
  }

  bool is_raise() const {
    return kind == ActionKind::kBetRaise || kind == ActionKind::kAllIn;
  }

  // Canonical order: FOLD, CHECK_CALL, BET_RAISE by amount, ALL_IN.
  friend auto operator<=>(const GameAction&, const GameAction&) = default;
};

std::string to_string(const GameAction& action);
GameAction parse_action(const std::string& token);

struct GameConfig {
  GameKind kind = GameKind::kNlLeduc;
  int ante = 1;
  // Starting chips per player, ante included.
  int stack = 20;

  static GameConfig toy() { return {GameKind::kToy, 1, 3}; }
  static GameConfig kuhn() { return {GameKind::kKuhn, 1, 2}; }
  static GameConfig nl_leduc(int stack = 20, int ante = 1) {
    return {GameKind::kNlLeduc, ante, stack};
  }
  static GameConfig defaults(GameKind kind);

  bool operator==(const GameConfig&) const = default;
};

// Size of the deck; private cards and board cards are ids in [0, num_cards).
int num_cards(GameKind kind);
std::string card_name(GameKind kind, int card);
int parse_card(GameKind kind, const std::string& name);
// J=0, Q=1, K=2 in every game.
int card_rank(GameKind kind, int card);

enum class Phase : uint8_t { kDeal, kBetting, kBoard, kTerminal };

// Everything both players observe. Private cards live in GameState.
struct PublicState {
  GameConfig config;
  Phase phase = Phase::kDeal;
  int acting = kChancePlayer;
  int round = 0;
  int board = -1;
  std::array<int, 2> contrib{0, 0};
  std::array<int, 2> stacks{0, 0};
  // Size of the last raise increment this round.
  int last_raise = 0;
  int actions_this_round = 0;
  int folded = -1;
  // Non-chance actions and board reveals.
  std::vector<GameAction> history;

  int pot() const { return contrib[0] + contrib[1]; }
  int to_call() const;
  bool is_terminal() const { return phase == Phase::kTerminal; }
  bool is_chance() const { return phase == Phase::kDeal || phase == Phase::kBoard; }
  bool is_decision() const { return phase == Phase::kBetting; }
  int total_chips() const { return pot() + stacks[0] + stacks[1]; }

  bool operator==(const PublicState&) const = default;
};

// State right after the private deal: antes posted, first player to act.
PublicState initial_public_state(const GameConfig& config);

std::vector<GameAction> legal_actions(const PublicState& state);
bool is_legal(const PublicState& state, const GameAction& action);
// Applies a betting action or a board reveal (CHANCE_OUTCOME with the card id).
PublicState apply(const PublicState& state, const GameAction& action);

// Chips the player would commit by going all in, capped by what the opponent
// can match.
int all_in_amount(const PublicState& state);

// Some holdings have a single forced action (the toy game's automatic all-in
// with a King). Returns that action if it applies.
std::optional<GameAction> forced_action(const PublicState& state, int player, int card);

// Per-player prior over private cards right after the deal.
std::array<std::vector<double>, 2> prior_beliefs(const GameConfig& config);

bool cards_compatible(int card0, int card1, int board);

// Probability weight of each board reveal for a compatible pair of hands.
double board_outcome_weight(const PublicState& state);

// Net chip change for `player` at a terminal public state given both hands.
double terminal_utility(const PublicState& state, int player, int own_card, int opp_card);

std::string public_key(const PublicState& state);
PublicState parse_public_key(const std::string& key);
std::string infostate_key(const PublicState& state, int player, int card);

// Concrete history node.
class GameState {
 public:
  static GameState initial(const GameConfig& config);

  const PublicState& pub() const { return pub_; }
  const GameConfig& config() const { return pub_.config; }
  int acting() const;
  bool is_terminal() const { return pub_.is_terminal(); }
  bool is_chance() const { return pub_.is_chance(); }
  int private_card(int player) const { return cards_[player]; }
  const std::vector<GameAction>& action_history() const { return history_; }

  bool operator==(const GameState&) const = default;

 private:
  friend GameState apply(const GameState&, const GameAction&);
  PublicState pub_;
  std::array<int, 2> cards_{-1, -1};
  std::vector<GameAction> history_;
};

std::vector<GameAction> legal_actions(const GameState& state);
GameState apply(const GameState& state, const GameAction& action);
double terminal_utility(const GameState& state, int player);
std::vector<std::pair<GameAction, double>> chance_outcomes(const GameState& state);
std::string infostate_key(const GameState& state, int player);
std::string public_key(const GameState& state);
// Rebuilds a state from its full action history (chance outcomes included).
GameState replay(const GameConfig& config, const std::vector<GameAction>& history);

}  // namespace rlcfr
