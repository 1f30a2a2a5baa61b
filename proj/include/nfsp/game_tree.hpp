#pragma once

// Fully expanded game tree for the small games, and dense tabular policies
// indexed by information-state id. Everything in exact.hpp is built on the
// routines here; the key-based API converts to and from these tables.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nfsp/game.hpp"

namespace nfsp::exact {

struct Infoset {
  std::string key;
  int player = 0;
  int depth = 0;
  game::ActionMask legal;
  // Previous information state of the same player on every path to this one
  // (unique under perfect recall), or -1 at the player's first decision.
  int parent = -1;
  game::Action parent_action = game::Action::kCall;
  game::EncodingBits encoding{};
};

struct TreeNode {
  enum class Kind : std::uint8_t { kChance, kDecision, kTerminal };
  Kind kind = Kind::kTerminal;
  std::int8_t player = -1;
  int infoset = -1;
  int depth = 0;
  int first_child = 0;
  int num_children = 0;
  game::Action action = game::Action::kCall;  // edge from the parent
  double chance_prob = 1.0;                   // edge from a chance parent
  double payoff0 = 0.0;                       // terminal chips of player 0
};

// One row per information state, columns in action order (Fold, Call, Raise);
// illegal columns hold 0.
using PolicyTable = std::vector<std::array<double, game::kNumActions>>;

class GameTree {
 public:
  // Throws std::length_error for games too large to expand.
  explicit GameTree(const game::GameSpec& spec);

  const game::GameSpec& spec() const { return *spec_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<Infoset>& infosets() const { return infosets_; }
  const std::vector<int>& PlayerInfosets(int player) const {
    return player_infosets_[player];
  }
  // Infosets of `player` at `depth`.
  std::span<const int> InfosetsAtDepth(int player, int depth) const;
  // Nodes with the given depth form the index range [begin, end).
  std::pair<int, int> Level(int depth) const {
    return {level_offsets_[depth], level_offsets_[depth + 1]};
  }
  int MaxDepth() const { return static_cast<int>(level_offsets_.size()) - 2; }
  int NumTerminals() const { return num_terminals_; }
  // -1 if absent.
  int FindInfoset(std::string_view key) const;

 private:
  const game::GameSpec* spec_;
  std::vector<TreeNode> nodes_;
  std::vector<int> level_offsets_;
  std::vector<Infoset> infosets_;
  std::array<std::vector<int>, game::kNumPlayers> player_infosets_;
  std::array<std::vector<std::vector<int>>, game::kNumPlayers> by_depth_;
  std::unordered_map<std::string, int> index_;
  int num_terminals_ = 0;
};

// Shared, lazily built tree per game. Throws std::length_error for LHE.
const GameTree& TreeFor(const game::GameSpec& spec);

PolicyTable UniformPolicy(const GameTree& tree);

// Expected chips per player.
std::array<double, game::kNumPlayers> ExpectedPayoff(const GameTree& tree,
                                                     const PolicyTable& policy);

// Backward-induction best response of `player` against the other rows of
// `policy`. Writes the player's rows into `out` (other rows untouched) and
// returns the best-response value. With `noise` > 0 each information state
// independently takes the uniform-random branch with that probability, and
// passes back the value of a uniformly random action instead of the best one.
double BestResponse(const GameTree& tree, const PolicyTable& policy,
                    int player, PolicyTable& out, double noise = 0.0,
                    game::Rng* rng = nullptr);

// Mean of the two best-response values.
double Exploitability(const GameTree& tree, const PolicyTable& policy);

// x(s) for every information state of `player`; 0 for other players' rows.
std::vector<double> RealizationWeights(const GameTree& tree,
                                       const PolicyTable& policy, int player);

// Realization-weighted convex combination of the rows of `player`. Rows of
// the other player are copied from `a`.
PolicyTable MixPolicies(const GameTree& tree, const PolicyTable& a,
                        double weight_a, const PolicyTable& b, double weight_b,
                        int player);

// Reach probability of every node under the profile (chance included).
std::vector<double> ReachProbabilities(const GameTree& tree,
                                       const PolicyTable& policy);

}  // namespace nfsp::exact
