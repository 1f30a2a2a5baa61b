#pragma once

// Head-to-head play. Duplicate matches deal the same cards twice with the
// seats swapped; results are in milli-big-blinds per hand for the first policy.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nfsp/exact.hpp"
#include "nfsp/game.hpp"
#include "nfsp/mlp.hpp"

namespace nfsp::harness {

class Policy {
 public:
  virtual ~Policy() = default;
  // Distribution over (Fold, Call, Raise) at a decision node of `state`;
  // illegal actions get 0.
  virtual std::array<double, game::kNumActions> Probabilities(
      const game::GameState& state) const = 0;
  virtual std::string name() const = 0;
};

enum class Scripted { kAlwaysFold, kAlwaysCall, kAlwaysRaise, kUniform };

// Where an action is illegal the bot calls instead.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(Scripted kind) : kind_(kind) {}
  std::array<double, game::kNumActions> Probabilities(
      const game::GameState& state) const override;
  std::string name() const override;

 private:
  Scripted kind_;
};

// Lookup by info-state key; a missing key throws exact::StrategyError.
class TabularPolicy : public Policy {
 public:
  TabularPolicy(exact::StrategyProfile profile, std::string name = "tabular")
      : profile_(std::move(profile)), name_(std::move(name)) {}
  std::array<double, game::kNumActions> Probabilities(
      const game::GameState& state) const override;
  std::string name() const override { return name_; }

 private:
  exact::StrategyProfile profile_;
  std::string name_;
};

// One network per seat, either sampled through the masked softmax or played
// greedily (argmax, ties to the lowest action).
class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(std::array<neural::Mlp, game::kNumPlayers> nets, bool greedy,
                std::string name = "network")
      : nets_(std::move(nets)), greedy_(greedy), name_(std::move(name)) {}
  std::array<double, game::kNumActions> Probabilities(
      const game::GameState& state) const override;
  std::string name() const override { return name_; }

 private:
  std::array<neural::Mlp, game::kNumPlayers> nets_;
  bool greedy_;
  std::string name_;
};

// always_fold, always_call, always_raise or uniform.
std::unique_ptr<Policy> MakeScripted(const std::string& name);

struct MatchResult {
  std::uint64_t hands = 0;
  double mean_mbbh = 0.0;  // for the first policy
  double std_error = 0.0;
};

struct MatchOptions {
  std::uint64_t hands = 10000;
  std::uint64_t seed = 0;
  // Duplicate pairs share one deck order with seats swapped. The standard
  // error is then taken over pair means. Otherwise every hand has its own
  // deck, seats alternate and the error is over single hands.
  bool duplicate = true;
};

MatchResult RunMatch(const game::GameSpec& spec, const Policy& first,
                     const Policy& second, const MatchOptions& options);

// Chip result for seat 0 of one hand dealt from `deck` (a permutation).
int PlayHand(const game::GameSpec& spec, const Policy& seat0, const Policy& seat1,
             const std::vector<int>& deck, game::Rng& rng);

}  // namespace nfsp::harness
