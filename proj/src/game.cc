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

#include "rlcfr/game.h"

#include <algorithm>
#include <sstream>

#include "rlcfr/error.h"

namespace rlcfr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTerminalState: return "TERMINAL_STATE";
    case ErrorCode::kIllegalAction: return "ILLEGAL_ACTION";
    case ErrorCode::kNotTerminal: return "NOT_TERMINAL";
    case ErrorCode::kNotChance: return "NOT_CHANCE";
    case ErrorCode::kEmptyActions: return "EMPTY_ACTIONS";
    case ErrorCode::kLeafEvalFailed: return "LEAF_EVAL_FAILED";
    case ErrorCode::kIncompleteProfile: return "INCOMPLETE_PROFILE";
    case ErrorCode::kIllegalAbstraction: return "ILLEGAL_ABSTRACTION";
    case ErrorCode::kZeroReach: return "ZERO_REACH";
    case ErrorCode::kDimMismatch: return "DIM_MISMATCH";
    case ErrorCode::kNonfiniteGrad: return "NONFINITE_GRAD";
    case ErrorCode::kCorruptCheckpoint: return "CORRUPT_CHECKPOINT";
    case ErrorCode::kSpecMismatch: return "SPEC_MISMATCH";
    case ErrorCode::kNotDecisionPbs: return "NOT_DECISION_PBS";
    case ErrorCode::kEmptyAbstraction: return "EMPTY_ABSTRACTION";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kConfig: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

namespace {

constexpr int kToyQueen = 1;
constexpr int kToyKing = 2;

int last_round(GameKind kind) { return kind == GameKind::kNlLeduc ? 1 : 0; }

int hand_strength(GameKind kind, int card, int board) {
  const int rank = card_rank(kind, card);
  if (kind == GameKind::kNlLeduc && board >= 0 && card_rank(kind, board) == rank) {
    return 10 + rank;
  }
  return rank;
}

void end_round(PublicState& s) {
  if (s.round >= last_round(s.config.kind)) {
    s.phase = Phase::kTerminal;
    s.acting = kTerminalPlayer;
    return;
  }
  s.phase = Phase::kBoard;
  s.acting = kChancePlayer;
  s.round += 1;
  s.last_raise = 0;
  s.actions_this_round = 0;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string phase_name(Phase phase) {
  switch (phase) {
    case Phase::kDeal: return "deal";
    case Phase::kBetting: return "bet";
    case Phase::kBoard: return "board";
    case Phase::kTerminal: return "end";
  }
  return "?";
}

Phase parse_phase(const std::string& name) {
  if (name == "deal") return Phase::kDeal;
  if (name == "bet") return Phase::kBetting;
  if (name == "board") return Phase::kBoard;
  if (name == "end") return Phase::kTerminal;
  throw Error(ErrorCode::kInvalidArgument, "bad phase '" + name + "'");
}

}  // namespace

std::string game_kind_name(GameKind kind) {
  switch (kind) {
    case GameKind::kToy: return "toy";
    case GameKind::kKuhn: return "kuhn";
    case GameKind::kNlLeduc: return "nl-leduc";
  }
  return "?";
}

GameKind parse_game_kind(const std::string& name) {
  if (name == "toy") return GameKind::kToy;
  if (name == "kuhn") return GameKind::kKuhn;
  if (name == "nl-leduc" || name == "leduc") return GameKind::kNlLeduc;
  throw Error(ErrorCode::kInvalidArgument, "unknown game '" + name + "'");
}

GameConfig GameConfig::defaults(GameKind kind) {
  switch (kind) {
    case GameKind::kToy: return toy();
    case GameKind::kKuhn: return kuhn();
    case GameKind::kNlLeduc: return nl_leduc();
  }
  return nl_leduc();
}

std::string to_string(const GameAction& action) {
  switch (action.kind) {
    case ActionKind::kFold: return "f";
    case ActionKind::kCheckCall: return "c";
    case ActionKind::kBetRaise: return "b" + std::to_string(action.amount);
    case ActionKind::kAllIn: return "a";
    case ActionKind::kChanceOutcome: return "d" + std::to_string(action.outcome_id);
  }
  return "?";
}

GameAction parse_action(const std::string& token) {
  if (token == "f") return GameAction::fold();
  if (token == "c") return GameAction::check_call();
  if (token == "a") return GameAction::all_in();
  if (token.size() > 1 && (token[0] == 'b' || token[0] == 'd')) {
    const int value = std::stoi(token.substr(1));
    return token[0] == 'b' ? GameAction::bet(value) : GameAction::chance(value);
  }
  throw Error(ErrorCode::kInvalidArgument, "bad action token '" + token + "'");
}

int num_cards(GameKind kind) { return kind == GameKind::kNlLeduc ? 6 : 3; }

std::string card_name(GameKind kind, int card) {
  static const char* kRanks = "JQK";
  if (card < 0 || card >= num_cards(kind)) return "?";
  if (kind == GameKind::kNlLeduc) {
    return std::string(1, kRanks[card / 2]) + (card % 2 == 0 ? "s" : "h");
  }
  return std::string(1, kRanks[card]);
}

int parse_card(GameKind kind, const std::string& name) {
  for (int c = 0; c < num_cards(kind); ++c) {
    if (card_name(kind, c) == name) return c;
  }
  if (name == "?" || name == "-") return -1;
  throw Error(ErrorCode::kInvalidArgument, "bad card '" + name + "'");
}

int card_rank(GameKind kind, int card) {
  return kind == GameKind::kNlLeduc ? card / 2 : card;
}

int PublicState::to_call() const {
  if (acting < 0) return 0;
  return contrib[1 - acting] - contrib[acting];
}

PublicState initial_public_state(const GameConfig& config) {
  if (config.ante <= 0 || config.stack <= config.ante) {
    throw Error(ErrorCode::kInvalidArgument, "stack must exceed a positive ante");
  }
  PublicState s;
  s.config = config;
  s.phase = Phase::kBetting;
  s.acting = 0;
  s.contrib = {config.ante, config.ante};
  s.stacks = {config.stack - config.ante, config.stack - config.ante};
  return s;
}

int all_in_amount(const PublicState& s) {
  const int me = s.acting;
  return std::min(s.stacks[me], s.to_call() + s.stacks[1 - me]);
}

std::vector<GameAction> legal_actions(const PublicState& s) {
  if (s.phase == Phase::kTerminal) {
    throw Error(ErrorCode::kTerminalState, "no actions at a terminal state");
  }
  std::vector<GameAction> out;
  if (s.phase == Phase::kBoard) {
    for (int c = 0; c < num_cards(s.config.kind); ++c) out.push_back(GameAction::chance(c));
    return out;
  }
  if (s.phase == Phase::kDeal) {
    throw Error(ErrorCode::kInvalidArgument, "deal outcomes are private");
  }
  const int tc = s.to_call();
  if (tc > 0) out.push_back(GameAction::fold());
  out.push_back(GameAction::check_call());
  switch (s.config.kind) {
    case GameKind::kToy:
      if (s.history.empty()) out.push_back(GameAction::all_in());
      break;
    case GameKind::kKuhn:
      if (tc == 0 && s.stacks[s.acting] > 0) out.push_back(GameAction::bet(1));
      break;
    case GameKind::kNlLeduc: {
      const int cap = all_in_amount(s);
      if (cap > tc) {
        const int min_inc = std::max(s.last_raise, s.config.ante);
        for (int amount = tc + min_inc; amount < cap; ++amount) {
          out.push_back(GameAction::bet(amount));
        }
        out.push_back(GameAction::all_in());
      }
      break;
    }
  }
  return out;
}

bool is_legal(const PublicState& s, const GameAction& action) {
  if (s.phase == Phase::kTerminal || s.phase == Phase::kDeal) return false;
  if (s.phase == Phase::kBoard) {
    return action.kind == ActionKind::kChanceOutcome && action.outcome_id >= 0 &&
           action.outcome_id < num_cards(s.config.kind);
  }
  const int tc = s.to_call();
  switch (action.kind) {
    case ActionKind::kFold: return tc > 0;
    case ActionKind::kCheckCall: return true;
    case ActionKind::kChanceOutcome: return false;
    default: break;
  }
  // Raises: cheap checks instead of enumerating the full list.
  switch (s.config.kind) {
    case GameKind::kToy:
      return action.kind == ActionKind::kAllIn && s.history.empty();
    case GameKind::kKuhn:
      return action == GameAction::bet(1) && tc == 0 && s.stacks[s.acting] > 0;
    case GameKind::kNlLeduc: {
      const int cap = all_in_amount(s);
      if (cap <= tc) return false;
      if (action.kind == ActionKind::kAllIn) return action.amount == 0;
      const int min_inc = std::max(s.last_raise, s.config.ante);
      return action.outcome_id == 0 && action.amount >= tc + min_inc && action.amount < cap;
    }
  }
  return false;
}

PublicState apply(const PublicState& state, const GameAction& action) {
  if (!is_legal(state, action)) {
    throw Error(ErrorCode::kIllegalAction,
                "action " + to_string(action) + " at " + public_key(state));
  }
  PublicState s = state;
  s.history.push_back(action);
  if (s.phase == Phase::kBoard) {
    s.board = action.outcome_id;
    if (s.stacks[0] == 0 || s.stacks[1] == 0) {
      s.phase = Phase::kTerminal;
      s.acting = kTerminalPlayer;
    } else {
      s.phase = Phase::kBetting;
      s.acting = 0;
    }
    return s;
  }
  const int me = s.acting;
  const int tc = s.to_call();
  switch (action.kind) {
    case ActionKind::kFold:
      s.folded = me;
      s.phase = Phase::kTerminal;
      s.acting = kTerminalPlayer;
      return s;
    case ActionKind::kCheckCall: {
      const int pay = std::min(tc, s.stacks[me]);
      s.contrib[me] += pay;
      s.stacks[me] -= pay;
      s.actions_this_round += 1;
      const bool closes = tc > 0 || s.actions_this_round >= 2 ||
                          s.config.kind == GameKind::kToy;
      if (closes) {
        end_round(s);
      } else {
        s.acting = 1 - me;
      }
      return s;
    }
    case ActionKind::kBetRaise:
    case ActionKind::kAllIn: {
      const int amount =
          action.kind == ActionKind::kAllIn ? all_in_amount(s) : action.amount;
      s.contrib[me] += amount;
      s.stacks[me] -= amount;
      s.last_raise = std::max(s.last_raise, amount - tc);
      s.actions_this_round += 1;
      s.acting = 1 - me;
      return s;
    }
    case ActionKind::kChanceOutcome:
      break;
  }
  throw Error(ErrorCode::kIllegalAction, "unexpected action");
}

std::optional<GameAction> forced_action(const PublicState& s, int player, int card) {
  if (s.config.kind == GameKind::kToy && s.phase == Phase::kBetting && player == 0 &&
      s.history.empty() && card == kToyKing) {
    return GameAction::all_in();
  }
  return std::nullopt;
}

std::array<std::vector<double>, 2> prior_beliefs(const GameConfig& config) {
  const int n = num_cards(config.kind);
  std::array<std::vector<double>, 2> beliefs;
  if (config.kind == GameKind::kToy) {
    beliefs[0] = {0.5, 0.0, 0.5};
    beliefs[1] = {0.0, 1.0, 0.0};
    return beliefs;
  }
  beliefs[0].assign(n, 1.0 / n);
  beliefs[1].assign(n, 1.0 / n);
  return beliefs;
}

bool cards_compatible(int card0, int card1, int board) {
  return card0 != card1 && card0 != board && card1 != board;
}

double board_outcome_weight(const PublicState& s) {
  const int remaining = num_cards(s.config.kind) - 2 - (s.board >= 0 ? 1 : 0);
  return 1.0 / remaining;
}

double terminal_utility(const PublicState& s, int player, int own_card, int opp_card) {
  if (s.phase != Phase::kTerminal) {
    throw Error(ErrorCode::kNotTerminal, "utility of a non-terminal state");
  }
  const int opp = 1 - player;
  if (s.folded >= 0) {
    return s.folded == player ? -s.contrib[player] : s.contrib[opp];
  }
  const int mine = hand_strength(s.config.kind, own_card, s.board);
  const int theirs = hand_strength(s.config.kind, opp_card, s.board);
  if (mine > theirs) return s.contrib[opp];
  if (mine < theirs) return -s.contrib[player];
  return 0.5 * s.pot() - s.contrib[player];
}

std::string public_key(const PublicState& s) {
  std::ostringstream out;
  out << "g=" << game_kind_name(s.config.kind) << ";a=" << s.config.ante
      << ";s=" << s.config.stack << ";ph=" << phase_name(s.phase) << ";p=" << s.acting
      << ";r=" << s.round << ";b=" << card_name(s.config.kind, s.board)
      << ";c=" << s.contrib[0] << "," << s.contrib[1] << ";k=" << s.stacks[0] << ","
      << s.stacks[1] << ";lr=" << s.last_raise << ";n=" << s.actions_this_round
      << ";f=" << s.folded << ";h=";
  for (size_t i = 0; i < s.history.size(); ++i) {
    if (i > 0) out << '.';
    out << to_string(s.history[i]);
  }
  return out.str();
}

PublicState parse_public_key(const std::string& key) {
  PublicState s;
  for (const auto& field : split(key, ';')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "bad public key field '" + field + "'");
    }
    const std::string name = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (name == "g") {
      s.config.kind = parse_game_kind(value);
    } else if (name == "a") {
      s.config.ante = std::stoi(value);
    } else if (name == "s") {
      s.config.stack = std::stoi(value);
    } else if (name == "ph") {
      s.phase = parse_phase(value);
    } else if (name == "p") {
      s.acting = std::stoi(value);
    } else if (name == "r") {
      s.round = std::stoi(value);
    } else if (name == "b") {
      s.board = parse_card(s.config.kind, value);
    } else if (name == "c" || name == "k") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw Error(ErrorCode::kInvalidArgument, "bad pair " + value);
      auto& target = name == "c" ? s.contrib : s.stacks;
      target = {std::stoi(parts[0]), std::stoi(parts[1])};
    } else if (name == "lr") {
      s.last_raise = std::stoi(value);
    } else if (name == "n") {
      s.actions_this_round = std::stoi(value);
    } else if (name == "f") {
      s.folded = std::stoi(value);
    } else if (name == "h") {
      if (!value.empty()) {
        for (const auto& token : split(value, '.')) s.history.push_back(parse_action(token));
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown public key field '" + name + "'");
    }
  }
  return s;
}

std::string infostate_key(const PublicState& s, int player, int card) {
  return "p" + std::to_string(player) + ":" + card_name(s.config.kind, card) + "|" +
         public_key(s);
}

GameState GameState::initial(const GameConfig& config) {
  GameState g;
  g.pub_ = initial_public_state(config);
  g.pub_.phase = Phase::kDeal;
  g.pub_.acting = kChancePlayer;
  return g;
}

int GameState::acting() const { return pub_.acting; }

std::vector<GameAction> legal_actions(const GameState& state) {
  if (state.is_terminal()) {
    throw Error(ErrorCode::kTerminalState, "no actions at a terminal state");
  }
  if (state.is_chance()) {
    std::vector<GameAction> out;
    for (const auto& [action, p] : chance_outcomes(state)) out.push_back(action);
    return out;
  }
  const int me = state.acting();
  if (auto forced = forced_action(state.pub(), me, state.private_card(me))) {
    return {*forced};
  }
  return legal_actions(state.pub());
}

std::vector<std::pair<GameAction, double>> chance_outcomes(const GameState& state) {
  if (!state.is_chance()) {
    throw Error(ErrorCode::kNotChance, "not a chance node");
  }
  std::vector<std::pair<GameAction, double>> out;
  const GameKind kind = state.config().kind;
  const int n = num_cards(kind);
  if (state.pub().phase == Phase::kDeal) {
    if (kind == GameKind::kToy) {
      out.emplace_back(GameAction::chance(0), 0.5);
      out.emplace_back(GameAction::chance(kToyKing), 0.5);
      return out;
    }
    const double p = 1.0 / (n * (n - 1));
    for (int c0 = 0; c0 < n; ++c0) {
      for (int c1 = 0; c1 < n; ++c1) {
        if (c0 != c1) out.emplace_back(GameAction::chance(c0 * n + c1), p);
      }
    }
    return out;
  }
  const double p = 1.0 / (n - 2);
  for (int c = 0; c < n; ++c) {
    if (c != state.private_card(0) && c != state.private_card(1)) {
      out.emplace_back(GameAction::chance(c), p);
    }
  }
  return out;
}

GameState apply(const GameState& state, const GameAction& action) {
  if (state.is_terminal()) {
    throw Error(ErrorCode::kTerminalState, "cannot act at a terminal state");
  }
  GameState next = state;
  if (state.pub().phase == Phase::kDeal) {
    const auto outcomes = chance_outcomes(state);
    const bool known = std::any_of(outcomes.begin(), outcomes.end(),
                                   [&](const auto& o) { return o.first == action; });
    if (!known) throw Error(ErrorCode::kIllegalAction, "bad deal " + to_string(action));
    const int n = num_cards(state.config().kind);
    if (state.config().kind == GameKind::kToy) {
      next.cards_ = {action.outcome_id, kToyQueen};
    } else {
      next.cards_ = {action.outcome_id / n, action.outcome_id % n};
    }
    next.pub_.phase = Phase::kBetting;
    next.pub_.acting = 0;
    next.history_.push_back(action);
    if (auto forced = forced_action(next.pub_, 0, next.cards_[0])) {
      next.pub_ = apply(next.pub_, *forced);
      next.history_.push_back(*forced);
    }
    return next;
  }
  if (state.is_chance()) {
    if (action.kind != ActionKind::kChanceOutcome ||
        action.outcome_id == state.cards_[0] || action.outcome_id == state.cards_[1]) {
      throw Error(ErrorCode::kIllegalAction, "bad board " + to_string(action));
    }
  } else {
    const auto legal = legal_actions(state);
    if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
      throw Error(ErrorCode::kIllegalAction,
                  "action " + to_string(action) + " at " + public_key(state.pub()));
    }
  }
  next.pub_ = apply(state.pub_, action);
  next.history_.push_back(action);
  return next;
}

double terminal_utility(const GameState& state, int player) {
  if (!state.is_terminal()) {
    throw Error(ErrorCode::kNotTerminal, "utility of a non-terminal state");
  }
  return terminal_utility(state.pub(), player, state.private_card(player),
                          state.private_card(1 - player));
}

std::string infostate_key(const GameState& state, int player) {
  return infostate_key(state.pub(), player, state.private_card(player));
}

std::string public_key(const GameState& state) { return public_key(state.pub()); }

GameState replay(const GameConfig& config, const std::vector<GameAction>& history) {
  GameState state = GameState::initial(config);
  for (size_t i = 0; i < history.size(); ++i) {
    // Forced actions are re-applied by the deal itself.
    if (i > 0 && state.action_history().size() > i) continue;
    state = apply(state, history[i]);
  }
  return state;
}

}  // namespace rlcfr
