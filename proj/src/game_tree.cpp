#include "nfsp/game_tree.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace nfsp::exact {

using game::Action;
using game::GameState;
using game::kNumActions;
using game::kNumPlayers;

GameTree::GameTree(const game::GameSpec& spec) : spec_(&spec) {
  if (!spec.Enumerable()) {
    throw std::length_error(spec.name + " is too large for full-width traversal");
  }
  struct Pending {
    GameState state;
    std::array<int, kNumPlayers> last_infoset;
    std::array<Action, kNumPlayers> last_action;
  };
  std::vector<Pending> pending;
  pending.push_back({GameState(spec), {-1, -1}, {Action::kCall, Action::kCall}});
  nodes_.push_back(TreeNode{});

  for (std::size_t i = 0; i < pending.size(); ++i) {
    // Copy: `pending` grows while children are appended.
    const Pending cur = pending[i];
    const GameState& s = cur.state;
    auto add_child = [&](GameState child, Action a, double p,
                         const Pending& parent) {
      TreeNode c;
      c.depth = nodes_[i].depth + 1;
      c.action = a;
      c.chance_prob = p;
      nodes_.push_back(c);
      pending.push_back({std::move(child), parent.last_infoset, parent.last_action});
    };
    if (s.IsTerminal()) {
      nodes_[i].kind = TreeNode::Kind::kTerminal;
      nodes_[i].payoff0 = s.Payoffs()[0];
      ++num_terminals_;
      continue;
    }
    nodes_[i].first_child = static_cast<int>(nodes_.size());
    if (s.IsChance()) {
      nodes_[i].kind = TreeNode::Kind::kChance;
      auto outcomes = s.ChanceOutcomes();
      nodes_[i].num_children = static_cast<int>(outcomes.size());
      for (auto& [child, p] : outcomes) {
        add_child(std::move(child), Action::kCall, p, cur);
      }
      continue;
    }
    const int player = s.CurrentPlayer();
    nodes_[i].kind = TreeNode::Kind::kDecision;
    nodes_[i].player = static_cast<std::int8_t>(player);
    std::string key = s.InfoStateKey(player);
    auto it = index_.find(key);
    int id;
    if (it == index_.end()) {
      id = static_cast<int>(infosets_.size());
      Infoset info;
      info.key = key;
      info.player = player;
      info.depth = nodes_[i].depth;
      info.legal = s.LegalMask();
      info.parent = cur.last_infoset[player];
      info.parent_action = cur.last_action[player];
      info.encoding = s.EncodeBits(player);
      infosets_.push_back(std::move(info));
      index_.emplace(std::move(key), id);
      player_infosets_[player].push_back(id);
    } else {
      id = it->second;
      if (infosets_[id].parent != cur.last_infoset[player] ||
          infosets_[id].depth != nodes_[i].depth) {
        throw std::logic_error("perfect recall violated at " + infosets_[id].key);
      }
    }
    nodes_[i].infoset = id;
    const auto actions = s.LegalActions();
    nodes_[i].num_children = static_cast<int>(actions.size());
    for (Action a : actions) {
      Pending next_info = cur;
      next_info.last_infoset[player] = id;
      next_info.last_action[player] = a;
      add_child(s.Child(a), a, 1.0, next_info);
    }
  }

  level_offsets_.push_back(0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].depth != nodes_[i - 1].depth) {
      level_offsets_.push_back(static_cast<int>(i));
    }
  }
  level_offsets_.push_back(static_cast<int>(nodes_.size()));

  const int levels = MaxDepth() + 1;
  for (int p = 0; p < kNumPlayers; ++p) {
    by_depth_[p].assign(levels, {});
    for (int id : player_infosets_[p]) {
      by_depth_[p][infosets_[id].depth].push_back(id);
    }
  }
}

std::span<const int> GameTree::InfosetsAtDepth(int player, int depth) const {
  return by_depth_[player][depth];
}

int GameTree::FindInfoset(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? -1 : it->second;
}

const GameTree& TreeFor(const game::GameSpec& spec) {
  static std::mutex mu;
  static std::map<game::GameId, std::unique_ptr<GameTree>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[spec.id];
  if (!slot) slot = std::make_unique<GameTree>(spec);
  return *slot;
}

PolicyTable UniformPolicy(const GameTree& tree) {
  PolicyTable table(tree.infosets().size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto legal = tree.infosets()[i].legal;
    const double p = 1.0 / legal.Count();
    for (Action a : game::kAllActions) {
      table[i][game::ActionIndex(a)] = legal.Contains(a) ? p : 0.0;
    }
  }
  return table;
}

std::array<double, kNumPlayers> ExpectedPayoff(const GameTree& tree,
                                               const PolicyTable& policy) {
  const auto& nodes = tree.nodes();
  std::vector<double> value(nodes.size());
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const TreeNode& n = nodes[i];
    double v = 0;
    switch (n.kind) {
      case TreeNode::Kind::kTerminal:
        v = n.payoff0;
        break;
      case TreeNode::Kind::kChance:
        for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
          v += nodes[c].chance_prob * value[c];
        }
        break;
      case TreeNode::Kind::kDecision: {
        const auto& row = policy[n.infoset];
        for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
          v += row[game::ActionIndex(nodes[c].action)] * value[c];
        }
        break;
      }
    }
    value[i] = v;
  }
  return {value[0], -value[0]};
}

std::vector<double> ReachProbabilities(const GameTree& tree,
                                       const PolicyTable& policy) {
  const auto& nodes = tree.nodes();
  std::vector<double> reach(nodes.size(), 0.0);
  reach[0] = 1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
      const double edge = n.kind == TreeNode::Kind::kChance
                              ? nodes[c].chance_prob
                              : policy[n.infoset][game::ActionIndex(nodes[c].action)];
      reach[c] = reach[i] * edge;
    }
  }
  return reach;
}

double BestResponse(const GameTree& tree, const PolicyTable& policy,
                    int player, PolicyTable& out, double noise,
                    game::Rng* rng) {
  if (noise > 0 && rng == nullptr) {
    throw std::invalid_argument("noisy best response needs a random generator");
  }
  const auto& nodes = tree.nodes();
  const auto& infosets = tree.infosets();
  if (out.size() != infosets.size()) out.resize(infosets.size());

  // Opponent-and-chance reach of every node.
  std::vector<double> weight(nodes.size(), 0.0);
  weight[0] = 1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
      double edge = 1.0;
      if (n.kind == TreeNode::Kind::kChance) {
        edge = nodes[c].chance_prob;
      } else if (n.player != player) {
        edge = policy[n.infoset][game::ActionIndex(nodes[c].action)];
      }
      weight[c] = weight[i] * edge;
    }
  }

  std::vector<double> value(nodes.size(), 0.0);
  std::vector<std::array<double, kNumActions>> q(infosets.size());
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double sign = player == 0 ? 1.0 : -1.0;

  for (int d = tree.MaxDepth(); d >= 0; --d) {
    const auto [begin, end] = tree.Level(d);
    for (int i = begin; i < end; ++i) {
      const TreeNode& n = nodes[i];
      if (n.kind != TreeNode::Kind::kDecision || n.player != player) continue;
      auto& row = q[n.infoset];
      for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
        row[game::ActionIndex(nodes[c].action)] += weight[i] * value[c];
      }
    }
    for (int id : tree.InfosetsAtDepth(player, d)) {
      const auto legal = infosets[id].legal;
      auto& row = out[id];
      row = {0.0, 0.0, 0.0};
      if (noise > 0 && coin(*rng) < noise) {
        for (Action a : game::kAllActions) {
          if (legal.Contains(a)) row[game::ActionIndex(a)] = 1.0 / legal.Count();
        }
        continue;
      }
      int best = -1;
      for (Action a : game::kAllActions) {
        if (!legal.Contains(a)) continue;
        const int k = game::ActionIndex(a);
        // Ties go to the lowest action index.
        if (best < 0 || q[id][k] > q[id][best] + 1e-12) best = k;
      }
      row[best] = 1.0;
    }
    for (int i = begin; i < end; ++i) {
      const TreeNode& n = nodes[i];
      double v = 0;
      switch (n.kind) {
        case TreeNode::Kind::kTerminal:
          v = sign * n.payoff0;
          break;
        case TreeNode::Kind::kChance:
          for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
            v += nodes[c].chance_prob * value[c];
          }
          break;
        case TreeNode::Kind::kDecision: {
          const auto& row = n.player == player ? out[n.infoset] : policy[n.infoset];
          for (int c = n.first_child; c < n.first_child + n.num_children; ++c) {
            v += row[game::ActionIndex(nodes[c].action)] * value[c];
          }
          break;
        }
      }
      value[i] = v;
    }
  }
  return value[0];
}

double Exploitability(const GameTree& tree, const PolicyTable& policy) {
  PolicyTable br = policy;
  const double v0 = BestResponse(tree, policy, 0, br);
  const double v1 = BestResponse(tree, policy, 1, br);
  return 0.5 * (v0 + v1);
}

std::vector<double> RealizationWeights(const GameTree& tree,
                                       const PolicyTable& policy, int player) {
  const auto& infosets = tree.infosets();
  std::vector<double> x(infosets.size(), 0.0);
  // Parents always precede children in id order.
  for (int id : tree.PlayerInfosets(player)) {
    const Infoset& s = infosets[id];
    x[id] = s.parent < 0
                ? 1.0
                : x[s.parent] * policy[s.parent][game::ActionIndex(s.parent_action)];
  }
  return x;
}

PolicyTable MixPolicies(const GameTree& tree, const PolicyTable& a,
                        double weight_a, const PolicyTable& b, double weight_b,
                        int player) {
  const auto xa = RealizationWeights(tree, a, player);
  const auto xb = RealizationWeights(tree, b, player);
  PolicyTable out = a;
  for (int id : tree.PlayerInfosets(player)) {
    const double wa = weight_a * xa[id];
    const double wb = weight_b * xb[id];
    const double norm = wa + wb;
    const auto legal = tree.infosets()[id].legal;
    for (Action act : game::kAllActions) {
      const int k = game::ActionIndex(act);
      if (!legal.Contains(act)) {
        out[id][k] = 0.0;
      } else if (norm > 0) {
        out[id][k] = (wa * a[id][k] + wb * b[id][k]) / norm;
      } else {
        out[id][k] = 1.0 / legal.Count();
      }
    }
  }
  return out;
}

}  // namespace nfsp::exact
