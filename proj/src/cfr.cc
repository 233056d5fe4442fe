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

#include "rlcfr/cfr.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "rlcfr/error.h"

namespace rlcfr {

std::vector<double> regret_match(const std::vector<double>& regrets) {
  if (regrets.empty()) throw Error(ErrorCode::kEmptyActions, "regret_match on no actions");
  std::vector<double> out(regrets.size(), 0.0);
  double total = 0.0;
  for (size_t a = 0; a < regrets.size(); ++a) {
    out[a] = std::max(regrets[a], 0.0);
    total += out[a];
  }
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / regrets.size());
    return out;
  }
  for (double& p : out) p /= total;
  return out;
}

double dcfr_discount(int t, double regret, const DcfrParams& params) {
  const double exponent = regret > 0.0 ? params.alpha : params.beta;
  const double w = std::pow(static_cast<double>(t), exponent);
  return regret * (w / (w + 1.0));
}

double dcfr_average_discount(int t, const DcfrParams& params) {
  return std::pow(static_cast<double>(t) / (t + 1.0), params.gamma);
}

bool SubgameTree::hand_live(int player, int hand, int node) const {
  return root_beliefs[player][hand] > 0.0 && hand != nodes[node].state.board;
}

std::string SubgameTree::infostate(int node, int hand) const {
  const TreeNode& n = nodes[node];
  return infostate_key(n.state, n.acting(), hand);
}

int SubgameTree::num_infostates() const {
  int count = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind != NodeKind::kDecision) continue;
    for (int h = 0; h < num_hands; ++h) count += hand_live(nodes[i].acting(), h, i) ? 1 : 0;
  }
  return count;
}

std::vector<double> compat_matrix(int num_hands, int board) {
  std::vector<double> m(num_hands * num_hands, 0.0);
  for (int h = 0; h < num_hands; ++h) {
    for (int o = 0; o < num_hands; ++o) m[h * num_hands + o] = cards_compatible(h, o, board) ? 1.0 : 0.0;
  }
  return m;
}

SubgameTree build_tree(const PublicState& root, const Beliefs& beliefs, const TreeHooks& hooks) {
  SubgameTree tree;
  tree.config = root.config;
  tree.num_hands = num_cards(root.config.kind);
  tree.root_beliefs = beliefs;
  for (const auto& b : beliefs) {
    if (static_cast<int>(b.size()) != tree.num_hands) {
      throw Error(ErrorCode::kDimMismatch, "belief vector size");
    }
  }
  TreeNode first;
  first.state = root;
  tree.nodes.push_back(first);
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode node = tree.nodes[i];
    node.key = public_key(node.state);
    const PublicState& s = node.state;
    std::vector<PublicState> next;
    if (s.is_terminal()) {
      node.kind = NodeKind::kTerminal;
      tree.terminals.push_back(i);
    } else if (s.phase == Phase::kBoard) {
      const bool runout = s.stacks[0] == 0 || s.stacks[1] == 0;
      if (!runout && hooks.cut && hooks.cut(s, s.round - root.round)) {
        node.kind = NodeKind::kLeaf;
        tree.leaves.push_back(i);
      } else {
        node.kind = NodeKind::kChance;
        for (int c = 0; c < tree.num_hands; ++c) {
          node.actions.push_back(GameAction::chance(c));
          next.push_back(apply(s, GameAction::chance(c)));
        }
      }
    } else if (s.phase == Phase::kBetting) {
      node.kind = NodeKind::kDecision;
      auto acts = hooks.actions(s, node.depth);
      const auto chosen = acts;
      const int p = s.acting;
      std::vector<std::optional<GameAction>> forced(tree.num_hands);
      bool any_forced = false;
      for (int h = 0; h < tree.num_hands; ++h) {
        if (beliefs[p][h] <= 0.0 || h == s.board) continue;
        forced[h] = forced_action(s, p, h);
        if (forced[h]) {
          any_forced = true;
          if (std::find(acts.begin(), acts.end(), *forced[h]) == acts.end()) acts.push_back(*forced[h]);
        }
      }
      std::sort(acts.begin(), acts.end());
      acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
      if (chosen.empty()) throw Error(ErrorCode::kEmptyActions, "no actions at " + node.key);
      for (const auto& a : acts) {
        if (!is_legal(s, a)) {
          throw Error(ErrorCode::kIllegalAbstraction, to_string(a) + " at " + node.key);
        }
      }
      node.actions = acts;
      if (any_forced) {
        node.mask.assign(tree.num_hands * acts.size(), 1);
        for (int h = 0; h < tree.num_hands; ++h) {
          for (size_t a = 0; a < acts.size(); ++a) {
            // Actions added only for forced hands stay closed to the rest.
            node.mask[h * acts.size() + a] =
                forced[h] ? acts[a] == *forced[h]
                          : std::find(chosen.begin(), chosen.end(), acts[a]) != chosen.end();
          }
        }
      }
      for (const auto& a : acts) next.push_back(apply(s, a));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "tree root must follow the deal");
    }
    for (auto& child_state : next) {
      TreeNode child;
      child.state = std::move(child_state);
      child.parent = i;
      child.depth = node.kind == NodeKind::kChance ? 0 : node.depth + 1;
      node.children.push_back(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
    }
    tree.nodes[i] = std::move(node);
  }
  return tree;
}

SubgameTree build_full_tree(const GameConfig& config) {
  TreeHooks hooks;
  hooks.actions = [](const PublicState& s, int) { return legal_actions(s); };
  return build_tree(initial_public_state(config), prior_beliefs(config), hooks);
}

void write_profile(std::ostream& out, const StrategyProfile& profile) {
  char buf[64];
  for (const auto& [key, probs] : profile) {
    out << key << '\t';
    for (size_t a = 0; a < probs.size(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", probs[a]);
      out << (a ? "," : "") << buf;
    }
    out << '\n';
  }
}

StrategyProfile read_profile(std::istream& in) {
  StrategyProfile profile;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "profile line without tab");
    std::vector<double> probs;
    std::stringstream fields(line.substr(tab + 1));
    std::string item;
    while (std::getline(fields, item, ',')) probs.push_back(std::stod(item));
    profile[line.substr(0, tab)] = std::move(probs);
  }
  return profile;
}

namespace {

constexpr int64_t kNone = -1;

// Regret matching over the open actions of one hand, written into `out`.
void match_row(const TreeNode& node, int hand, const double* regrets, double* out) {
  const size_t n = node.actions.size();
  double total = 0.0;
  int open = 0;
  for (size_t a = 0; a < n; ++a) {
    if (!node.allowed(hand, a)) continue;
    ++open;
    total += std::max(regrets[a], 0.0);
  }
  for (size_t a = 0; a < n; ++a) {
    if (!node.allowed(hand, a)) {
      out[a] = 0.0;
    } else {
      out[a] = total > 0.0 ? std::max(regrets[a], 0.0) / total : 1.0 / open;
    }
  }
}

inline double* node_reach(std::vector<double>& reach, int hn, int node, int player) {
  return reach.data() + (static_cast<int64_t>(node) * 2 + player) * hn;
}
inline const double* node_reach(const std::vector<double>& reach, int hn, int node, int player) {
  return reach.data() + (static_cast<int64_t>(node) * 2 + player) * hn;
}

void forward_pass(const SubgameTree& tree, const TreeLayout& layout, const std::vector<double>& policy,
                  std::vector<double>& reach) {
  const int hn = tree.num_hands;
  reach.assign(tree.nodes.size() * 2 * hn, 0.0);
  for (int p = 0; p < 2; ++p) std::copy(tree.root_beliefs[p].begin(), tree.root_beliefs[p].end(), node_reach(reach, hn, 0, p));
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.children.empty()) continue;
    const double* r0 = node_reach(reach, hn, i, 0);
    const size_t na = node.actions.size();
    for (size_t a = 0; a < node.children.size(); ++a) {
      double* c0 = node_reach(reach, hn, node.children[a], 0);
      std::copy(r0, r0 + 2 * hn, c0);
      if (node.kind == NodeKind::kDecision) {
        double* mine = c0 + node.acting() * hn;
        const double* pol = policy.data() + layout.offset[i];
        for (int h = 0; h < hn; ++h) mine[h] *= pol[h * na + a];
      } else {
        const int card = node.actions[a].outcome_id;
        c0[card] = 0.0;
        c0[hn + card] = 0.0;
      }
    }
  }
}

double opp_mass(int hn, int hand, int board, const double* opp) {
  double total = 0.0;
  for (int o = 0; o < hn; ++o) {
    if (cards_compatible(hand, o, board)) total += opp[o];
  }
  return total;
}

enum class Mode { kFollow, kBest };

// Counterfactual values of `player` at every node, [node * H + h].
void backward_pass(const SubgameTree& tree, const TreeLayout& layout, int player,
                   const std::vector<double>& policy, const std::vector<double>& reach,
                   const std::vector<double>& leaf_values, Mode mode, std::vector<double>& cfv) {
  const int hn = tree.num_hands;
  const int opp = 1 - player;
  cfv.assign(tree.nodes.size() * hn, 0.0);
  for (int i = static_cast<int>(tree.nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& node = tree.nodes[i];
    double* out = cfv.data() + static_cast<int64_t>(i) * hn;
    const double* r = node_reach(reach, hn, i, opp);
    switch (node.kind) {
      case NodeKind::kTerminal: {
        const double* m = layout.payoff.data() + static_cast<int64_t>(layout.slot[i]) * hn * hn;
        for (int h = 0; h < hn; ++h) {
          double v = 0.0;
          if (player == 0) {
            for (int o = 0; o < hn; ++o) v += m[h * hn + o] * r[o];
          } else {
            for (int o = 0; o < hn; ++o) v -= m[o * hn + h] * r[o];
          }
          out[h] = v;
        }
        break;
      }
      case NodeKind::kLeaf: {
        const double* vals = leaf_values.data() + (static_cast<int64_t>(layout.slot[i]) * 2 + player) * hn;
        for (int h = 0; h < hn; ++h) {
          if (h != node.state.board) out[h] = vals[h] * opp_mass(hn, h, node.state.board, r);
        }
        break;
      }
      case NodeKind::kChance: {
        const double w = board_outcome_weight(node.state);
        for (int c : node.children) {
          const double* child = cfv.data() + static_cast<int64_t>(c) * hn;
          for (int h = 0; h < hn; ++h) out[h] += w * child[h];
        }
        break;
      }
      case NodeKind::kDecision: {
        const size_t na = node.actions.size();
        if (node.acting() != player) {
          for (int c : node.children) {
            const double* child = cfv.data() + static_cast<int64_t>(c) * hn;
            for (int h = 0; h < hn; ++h) out[h] += child[h];
          }
        } else if (mode == Mode::kFollow) {
          const double* pol = policy.data() + layout.offset[i];
          for (size_t a = 0; a < na; ++a) {
            const double* child = cfv.data() + static_cast<int64_t>(node.children[a]) * hn;
            for (int h = 0; h < hn; ++h) out[h] += pol[h * na + a] * child[h];
          }
        } else {
          for (int h = 0; h < hn; ++h) {
            double best = -1e300;
            for (size_t a = 0; a < na; ++a) {
              if (node.allowed(h, a)) best = std::max(best, cfv[static_cast<int64_t>(node.children[a]) * hn + h]);
            }
            out[h] = best;
          }
        }
        break;
      }
    }
  }
}

std::vector<double> root_infostate_values(const SubgameTree& tree, int player, const double* root_cfv) {
  std::vector<double> v(tree.num_hands, 0.0);
  const int board = tree.root().state.board;
  for (int h = 0; h < tree.num_hands; ++h) {
    const double mass = opp_mass(tree.num_hands, h, board, tree.root_beliefs[1 - player].data());
    if (tree.hand_live(player, h, 0) && mass > 0.0) v[h] = root_cfv[h] / mass;
  }
  return v;
}

std::vector<double> profile_policy(const SubgameTree& tree, const TreeLayout& layout,
                                   const StrategyProfile& profile, int only_player) {
  std::vector<double> policy(layout.table_size, 0.0);
  const int hn = tree.num_hands;
  std::vector<double> zero;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.kind != NodeKind::kDecision) continue;
    const size_t na = node.actions.size();
    zero.assign(na, 0.0);
    for (int h = 0; h < hn; ++h) {
      const int p = node.acting();
      double* row = policy.data() + layout.offset[i] + h * na;
      if (tree.hand_live(p, h, i) && (only_player < 0 || only_player == p)) {
        const auto key = tree.infostate(i, h);
        auto it = profile.find(key);
        if (it == profile.end()) throw Error(ErrorCode::kIncompleteProfile, "missing " + key);
        if (it->second.size() != na) throw Error(ErrorCode::kDimMismatch, "action count for " + key);
        std::copy(it->second.begin(), it->second.end(), row);
      } else {
        match_row(node, h, zero.data(), row);
      }
    }
  }
  return policy;
}

std::vector<double> evaluate_leaf_values(const SubgameTree& tree, const LeafEvaluator& leaf_eval,
                                         const std::vector<double>& reach) {
  const int hn = tree.num_hands;
  std::vector<Beliefs> leaf_reach(tree.leaves.size());
  for (size_t k = 0; k < tree.leaves.size(); ++k) {
    for (int p = 0; p < 2; ++p) {
      const double* src = node_reach(reach, hn, tree.leaves[k], p);
      leaf_reach[k][p].assign(src, src + hn);
    }
  }
  std::vector<Beliefs> values;
  try {
    values = leaf_eval(tree, leaf_reach);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLeafEvalFailed) throw;
    throw Error(ErrorCode::kLeafEvalFailed, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kLeafEvalFailed, e.what());
  }
  if (values.size() != tree.leaves.size()) throw Error(ErrorCode::kLeafEvalFailed, "wrong number of leaf values");
  std::vector<double> out(tree.leaves.size() * 2 * hn, 0.0);
  for (size_t k = 0; k < tree.leaves.size(); ++k) {
    for (int p = 0; p < 2; ++p) {
      if (static_cast<int>(values[k][p].size()) != hn) {
        throw Error(ErrorCode::kLeafEvalFailed, "leaf value vector has wrong size");
      }
      for (int h = 0; h < hn; ++h) {
        if (!std::isfinite(values[k][p][h])) throw Error(ErrorCode::kLeafEvalFailed, "non-finite leaf value");
        out[(k * 2 + p) * hn + h] = values[k][p][h];
      }
    }
  }
  return out;
}

StrategyProfile make_profile(const SubgameTree& tree, const TreeLayout& layout, const std::vector<double>& table) {
  StrategyProfile profile;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.kind != NodeKind::kDecision) continue;
    const size_t na = node.actions.size();
    const double* base = table.data() + layout.offset[i];
    for (int h = 0; h < tree.num_hands; ++h) {
      if (!tree.hand_live(node.acting(), h, i)) continue;
      profile[tree.infostate(i, h)] = std::vector<double>(base + h * na, base + (h + 1) * na);
    }
  }
  return profile;
}

}  // namespace

TreeLayout::TreeLayout(const SubgameTree& tree) : num_hands(tree.num_hands) {
  const int hn = tree.num_hands;
  offset.assign(tree.nodes.size(), kNone);
  slot.assign(tree.nodes.size(), -1);
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].kind != NodeKind::kDecision) continue;
    offset[i] = table_size;
    table_size += static_cast<int64_t>(hn) * tree.nodes[i].actions.size();
  }
  for (size_t k = 0; k < tree.leaves.size(); ++k) slot[tree.leaves[k]] = k;
  payoff.assign(tree.terminals.size() * hn * hn, 0.0);
  for (size_t k = 0; k < tree.terminals.size(); ++k) {
    const int i = tree.terminals[k];
    const PublicState& s = tree.nodes[i].state;
    slot[i] = k;
    for (int h = 0; h < hn; ++h) {
      for (int o = 0; o < hn; ++o) {
        if (cards_compatible(h, o, s.board)) payoff[(k * hn + h) * hn + o] = terminal_utility(s, 0, h, o);
      }
    }
  }
}

double belief_value(const SubgameTree& tree, int player, const std::vector<double>& values) {
  const int board = tree.root().state.board;
  const auto& mine = tree.root_beliefs[player];
  const auto& theirs = tree.root_beliefs[1 - player];
  double num = 0.0;
  double z = 0.0;
  for (int h = 0; h < tree.num_hands; ++h) {
    const double w = mine[h] * opp_mass(tree.num_hands, h, board, theirs.data());
    num += w * values[h];
    z += w;
  }
  return z > 0.0 ? num / z : 0.0;
}

DcfrSolver::DcfrSolver(const SubgameTree& tree, DcfrParams params, LeafEvaluator leaf_eval)
    : tree_(tree), params_(params), leaf_eval_(std::move(leaf_eval)), layout_(tree) {
  if (params_.iterations < 1) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!tree_.leaves.empty() && !leaf_eval_) {
    throw Error(ErrorCode::kLeafEvalFailed, "tree has leaves but no evaluator");
  }
  regrets_.assign(layout_.table_size, 0.0);
  avg_.assign(layout_.table_size, 0.0);
  policy_.assign(layout_.table_size, 0.0);
  value_sum_ = {std::vector<double>(tree_.num_hands, 0.0), std::vector<double>(tree_.num_hands, 0.0)};
}

void DcfrSolver::refresh_policy() {
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    const TreeNode& node = tree_.nodes[i];
    if (node.kind != NodeKind::kDecision) continue;
    const size_t na = node.actions.size();
    for (int h = 0; h < tree_.num_hands; ++h) {
      const int64_t at = layout_.offset[i] + h * na;
      match_row(node, h, regrets_.data() + at, policy_.data() + at);
    }
  }
}

std::vector<double> DcfrSolver::current_policy(int node) const {
  const TreeNode& n = tree_.nodes[node];
  const size_t na = n.actions.size();
  std::vector<double> out(tree_.num_hands * na);
  for (int h = 0; h < tree_.num_hands; ++h) {
    match_row(n, h, regrets_.data() + layout_.offset[node] + h * na, out.data() + h * na);
  }
  return out;
}

std::vector<double> DcfrSolver::average_policy(int node) const {
  const TreeNode& n = tree_.nodes[node];
  const size_t na = n.actions.size();
  std::vector<double> out(tree_.num_hands * na, 0.0);
  const std::vector<double> zero(na, 0.0);
  for (int h = 0; h < tree_.num_hands; ++h) {
    const double* s = avg_.data() + layout_.offset[node] + h * na;
    double total = 0.0;
    for (size_t a = 0; a < na; ++a) total += s[a];
    if (total > 0.0) {
      for (size_t a = 0; a < na; ++a) out[h * na + a] = s[a] / total;
    } else {
      match_row(n, h, zero.data(), out.data() + h * na);
    }
  }
  return out;
}

std::vector<Beliefs> DcfrSolver::current_reach() const {
  std::vector<double> policy(layout_.table_size);
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    if (tree_.nodes[i].kind != NodeKind::kDecision) continue;
    const auto row = current_policy(i);
    std::copy(row.begin(), row.end(), policy.begin() + layout_.offset[i]);
  }
  std::vector<double> flat;
  forward_pass(tree_, layout_, policy, flat);
  const int hn = tree_.num_hands;
  std::vector<Beliefs> out(tree_.nodes.size());
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    for (int p = 0; p < 2; ++p) {
      const double* src = node_reach(flat, hn, i, p);
      out[i][p].assign(src, src + hn);
    }
  }
  return out;
}

void DcfrSolver::evaluate_leaves() { leaf_values_ = evaluate_leaf_values(tree_, leaf_eval_, reach_); }

void DcfrSolver::update(int player) {
  const int hn = tree_.num_hands;
  const double avg_scale = dcfr_average_discount(t_, params_);
  const double wp = std::pow(static_cast<double>(t_), params_.alpha);
  const double wn = std::pow(static_cast<double>(t_), params_.beta);
  const double pos_scale = wp / (wp + 1.0);
  const double neg_scale = wn / (wn + 1.0);
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    const TreeNode& node = tree_.nodes[i];
    if (node.kind != NodeKind::kDecision || node.acting() != player) continue;
    const size_t na = node.actions.size();
    const double* own = node_reach(reach_, hn, i, player);
    const double* here = cfv_.data() + i * hn;
    for (int h = 0; h < hn; ++h) {
      const int64_t at = layout_.offset[i] + h * na;
      double* r = regrets_.data() + at;
      double* s = avg_.data() + at;
      const double* pol = policy_.data() + at;
      for (size_t a = 0; a < na; ++a) {
        if (!node.allowed(h, a)) continue;
        const double next = r[a] + cfv_[node.children[a] * hn + h] - here[h];
        r[a] = next * (next > 0.0 ? pos_scale : neg_scale);
        s[a] = (s[a] + own[h] * pol[a]) * avg_scale;
      }
    }
  }
  const auto v = root_infostate_values(tree_, player, cfv_.data());
  for (int h = 0; h < hn; ++h) {
    value_sum_[player][h] = value_sum_[player][h] * (t_ - 1.0) / (t_ + 1.0) + v[h] * 2.0 / (t_ + 1.0);
  }
}

void DcfrSolver::step() {
  ++t_;
  if (params_.alternating) {
    for (int p = 0; p < kNumPlayers; ++p) {
      refresh_policy();
      forward_pass(tree_, layout_, policy_, reach_);
      if (!tree_.leaves.empty()) evaluate_leaves();
      backward_pass(tree_, layout_, p, policy_, reach_, leaf_values_, Mode::kFollow, cfv_);
      nodes_touched_ += tree_.nodes.size();
      update(p);
    }
    return;
  }
  refresh_policy();
  forward_pass(tree_, layout_, policy_, reach_);
  if (!tree_.leaves.empty()) evaluate_leaves();
  std::vector<double> cfv1;
  backward_pass(tree_, layout_, 1, policy_, reach_, leaf_values_, Mode::kFollow, cfv1);
  backward_pass(tree_, layout_, 0, policy_, reach_, leaf_values_, Mode::kFollow, cfv_);
  nodes_touched_ += 2 * tree_.nodes.size();
  update(0);
  cfv_.swap(cfv1);
  update(1);
}

void DcfrSolver::run(const std::function<void(int, const DcfrSolver&)>& on_iteration) {
  while (t_ < params_.iterations) {
    step();
    if (on_iteration) on_iteration(t_, *this);
  }
}

StrategyProfile DcfrSolver::average_strategy() const {
  std::vector<double> table(layout_.table_size);
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    if (tree_.nodes[i].kind != NodeKind::kDecision) continue;
    const auto row = average_policy(i);
    std::copy(row.begin(), row.end(), table.begin() + layout_.offset[i]);
  }
  return make_profile(tree_, layout_, table);
}

StrategyProfile DcfrSolver::current_strategy() const {
  std::vector<double> table(layout_.table_size);
  for (size_t i = 0; i < tree_.nodes.size(); ++i) {
    if (tree_.nodes[i].kind != NodeKind::kDecision) continue;
    const auto row = current_policy(i);
    std::copy(row.begin(), row.end(), table.begin() + layout_.offset[i]);
  }
  return make_profile(tree_, layout_, table);
}

SubgameSolveResult DcfrSolver::result() const {
  SubgameSolveResult out;
  out.average = average_strategy();
  out.root_values = value_sum_;
  out.root_player = tree_.root().kind == NodeKind::kDecision ? tree_.root().acting() : 0;
  out.root_value = belief_value(tree_, out.root_player, value_sum_[out.root_player]);
  return out;
}

SubgameSolveResult solve(const SubgameTree& tree, const DcfrParams& params, const LeafEvaluator& leaf_eval) {
  DcfrSolver solver(tree, params, leaf_eval);
  solver.run();
  return solver.result();
}

Beliefs profile_values(const SubgameTree& tree, const StrategyProfile& profile, const LeafEvaluator& leaf_eval) {
  const TreeLayout layout(tree);
  const auto policy = profile_policy(tree, layout, profile, -1);
  std::vector<double> reach;
  forward_pass(tree, layout, policy, reach);
  std::vector<double> leaf_values;
  if (!tree.leaves.empty()) {
    if (!leaf_eval) throw Error(ErrorCode::kLeafEvalFailed, "tree has leaves but no evaluator");
    leaf_values = evaluate_leaf_values(tree, leaf_eval, reach);
  }
  Beliefs out;
  std::vector<double> cfv;
  for (int p = 0; p < kNumPlayers; ++p) {
    backward_pass(tree, layout, p, policy, reach, leaf_values, Mode::kFollow, cfv);
    out[p] = root_infostate_values(tree, p, cfv.data());
  }
  return out;
}

double best_response_value(const SubgameTree& tree, const StrategyProfile& profile, int responder) {
  if (!tree.leaves.empty()) throw Error(ErrorCode::kInvalidArgument, "best response needs a tree without leaves");
  const TreeLayout layout(tree);
  const auto policy = profile_policy(tree, layout, profile, 1 - responder);
  std::vector<double> reach;
  forward_pass(tree, layout, policy, reach);
  std::vector<double> cfv;
  backward_pass(tree, layout, responder, policy, reach, {}, Mode::kBest, cfv);
  return belief_value(tree, responder, root_infostate_values(tree, responder, cfv.data()));
}

std::pair<double, double> exploitability(const SubgameTree& tree, const StrategyProfile& profile) {
  const Beliefs values = profile_values(tree, profile);
  const double u0 = belief_value(tree, 0, values[0]);
  const double u1 = belief_value(tree, 1, values[1]);
  return {u0 + best_response_value(tree, profile, 1), u1 + best_response_value(tree, profile, 0)};
}

}  // namespace rlcfr
