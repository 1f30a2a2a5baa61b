#pragma once

// Exact full-width analysis of small games: expected payoff, best response,
// exploitability, realization-equivalent strategy mixing and extensive-form
// fictitious play (XFP).

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfsp/game.hpp"
#include "nfsp/game_tree.hpp"

namespace nfsp::exact {

// Info-state key -> probabilities over the legal actions, ordered
// (Fold, Call, Raise) with illegal actions omitted.
using BehaviouralStrategy = std::map<std::string, std::vector<double>, std::less<>>;
using StrategyProfile = std::array<BehaviouralStrategy, game::kNumPlayers>;
using RealizationWeightMap = std::map<std::string, double, std::less<>>;

// A strategy lacks an entry for a reachable information state, or an entry is
// not a distribution over that state's legal actions.
class StrategyError : public std::runtime_error {
 public:
  StrategyError(const std::string& key, const std::string& what)
      : std::runtime_error(what + ": '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Conversions between keyed strategies and dense tables. ToTable fills only
// the rows of `player` and throws StrategyError for missing/invalid rows.
void FillTable(const GameTree& tree, const BehaviouralStrategy& strategy,
               int player, PolicyTable& table);
PolicyTable ToTable(const GameTree& tree, const StrategyProfile& profile);
BehaviouralStrategy FromTable(const GameTree& tree, const PolicyTable& table,
                              int player);
StrategyProfile ProfileFromTable(const GameTree& tree, const PolicyTable& table);
BehaviouralStrategy UniformStrategy(const game::GameSpec& spec, int player);

std::array<double, game::kNumPlayers> ExpectedPayoff(
    const game::GameSpec& spec, const StrategyProfile& profile);

struct BestResponseResult {
  BehaviouralStrategy strategy;
  double value = 0.0;
};

// Only the opponent's strategy in `profile` is read.
BestResponseResult ComputeBestResponse(const game::GameSpec& spec,
                                       const StrategyProfile& profile,
                                       int player, double noise = 0.0,
                                       std::uint64_t seed = 0);

// (u1(BR1, pi2) + u2(pi1, BR2)) / 2 in chips per hand. An exploitability of
// 2*delta certifies a delta-Nash equilibrium.
double Exploitability(const game::GameSpec& spec, const StrategyProfile& profile);
inline double CertifiedNashEpsilon(double exploitability) {
  return exploitability / 2.0;
}

RealizationWeightMap ComputeRealizationWeights(const game::GameSpec& spec,
                                               const BehaviouralStrategy& strategy,
                                               int player);

// sigma(s, a) proportional to w1 x1(s) pi1(s, a) + w2 x2(s) pi2(s, a);
// states unreachable under both inputs get the uniform distribution.
BehaviouralStrategy MixStrategies(const game::GameSpec& spec,
                                  const BehaviouralStrategy& first,
                                  double first_weight,
                                  const BehaviouralStrategy& second,
                                  double second_weight, int player);

class StepsizeSchedule {
 public:
  enum class Kind { kHarmonic, kConstant };

  static StepsizeSchedule Harmonic() { return StepsizeSchedule(Kind::kHarmonic, 0); }
  // Throws std::invalid_argument unless 0 < c <= 1.
  static StepsizeSchedule Constant(double c);
  // "harmonic" or a number in (0, 1].
  static StepsizeSchedule Parse(const std::string& text);

  // Mixing weight of the new best response at iteration t >= 1.
  double operator()(int t) const {
    return kind_ == Kind::kHarmonic ? 1.0 / t : constant_;
  }
  Kind kind() const { return kind_; }
  double constant() const { return constant_; }
  std::string ToString() const;

 private:
  StepsizeSchedule(Kind kind, double c) : kind_(kind), constant_(c) {}
  Kind kind_;
  double constant_;
};

struct XfpOptions {
  int iterations = 1000;
  StepsizeSchedule schedule = StepsizeSchedule::Harmonic();
  double br_noise = 0.0;
  int eval_every = 1;
  std::uint64_t seed = 0;
};

struct XfpPoint {
  int iteration;
  double exploitability;
};

struct XfpResult {
  std::vector<XfpPoint> curve;
  PolicyTable average;
};

// Both players best-respond to the same frozen average profile, then both
// averages move towards their responses. The average starts uniform.
// Exploitability is recorded at iteration 1, every `eval_every` iterations
// and at the final iteration.
XfpResult RunXfp(const game::GameSpec& spec, const XfpOptions& options);

}  // namespace nfsp::exact
