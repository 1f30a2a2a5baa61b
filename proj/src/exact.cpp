#include "nfsp/exact.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "nfsp/threads.hpp"

namespace nfsp::exact {

using game::Action;
using game::kNumPlayers;

namespace {

constexpr double kSumTolerance = 1e-6;

}  // namespace

void FillTable(const GameTree& tree, const BehaviouralStrategy& strategy,
               int player, PolicyTable& table) {
  if (table.size() != tree.infosets().size()) {
    table.resize(tree.infosets().size());
  }
  for (int id : tree.PlayerInfosets(player)) {
    const Infoset& info = tree.infosets()[id];
    auto it = strategy.find(info.key);
    if (it == strategy.end()) {
      throw StrategyError(info.key, "strategy has no entry for information state");
    }
    const auto& probs = it->second;
    if (static_cast<int>(probs.size()) != info.legal.Count()) {
      throw StrategyError(info.key, "probability vector length differs from the "
                                    "number of legal actions");
    }
    double sum = 0;
    for (double p : probs) {
      if (!(p >= 0) || !std::isfinite(p)) {
        throw StrategyError(info.key, "negative or non-finite probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw StrategyError(info.key, "probabilities do not sum to 1");
    }
    auto& row = table[id];
    row = {0.0, 0.0, 0.0};
    std::size_t k = 0;
    for (Action a : info.legal.Actions()) row[game::ActionIndex(a)] = probs[k++] / sum;
  }
}

PolicyTable ToTable(const GameTree& tree, const StrategyProfile& profile) {
  PolicyTable table(tree.infosets().size());
  for (int p = 0; p < kNumPlayers; ++p) FillTable(tree, profile[p], p, table);
  return table;
}

BehaviouralStrategy FromTable(const GameTree& tree, const PolicyTable& table,
                              int player) {
  BehaviouralStrategy out;
  for (int id : tree.PlayerInfosets(player)) {
    const Infoset& info = tree.infosets()[id];
    std::vector<double> probs;
    for (Action a : info.legal.Actions()) probs.push_back(table[id][game::ActionIndex(a)]);
    out.emplace(info.key, std::move(probs));
  }
  return out;
}

StrategyProfile ProfileFromTable(const GameTree& tree, const PolicyTable& table) {
  return {FromTable(tree, table, 0), FromTable(tree, table, 1)};
}

BehaviouralStrategy UniformStrategy(const game::GameSpec& spec, int player) {
  const GameTree& tree = TreeFor(spec);
  return FromTable(tree, UniformPolicy(tree), player);
}

std::array<double, kNumPlayers> ExpectedPayoff(const game::GameSpec& spec,
                                               const StrategyProfile& profile) {
  const GameTree& tree = TreeFor(spec);
  return ExpectedPayoff(tree, ToTable(tree, profile));
}

BestResponseResult ComputeBestResponse(const game::GameSpec& spec,
                                       const StrategyProfile& profile,
                                       int player, double noise,
                                       std::uint64_t seed) {
  if (!(noise >= 0 && noise <= 1)) {
    throw std::invalid_argument("best-response noise must lie in [0, 1]");
  }
  const GameTree& tree = TreeFor(spec);
  PolicyTable table = UniformPolicy(tree);
  FillTable(tree, profile[1 - player], 1 - player, table);
  game::Rng rng(seed);
  PolicyTable out = table;
  const double value = BestResponse(tree, table, player, out, noise, &rng);
  return {FromTable(tree, out, player), value};
}

double Exploitability(const game::GameSpec& spec, const StrategyProfile& profile) {
  const GameTree& tree = TreeFor(spec);
  return Exploitability(tree, ToTable(tree, profile));
}

RealizationWeightMap ComputeRealizationWeights(const game::GameSpec& spec,
                                               const BehaviouralStrategy& strategy,
                                               int player) {
  const GameTree& tree = TreeFor(spec);
  PolicyTable table = UniformPolicy(tree);
  FillTable(tree, strategy, player, table);
  const auto x = RealizationWeights(tree, table, player);
  RealizationWeightMap out;
  for (int id : tree.PlayerInfosets(player)) out.emplace(tree.infosets()[id].key, x[id]);
  return out;
}

BehaviouralStrategy MixStrategies(const game::GameSpec& spec,
                                  const BehaviouralStrategy& first,
                                  double first_weight,
                                  const BehaviouralStrategy& second,
                                  double second_weight, int player) {
  if (first_weight < 0 || second_weight < 0 ||
      std::abs(first_weight + second_weight - 1.0) > 1e-9) {
    throw std::invalid_argument("mixing weights must be nonnegative and sum to 1");
  }
  const GameTree& tree = TreeFor(spec);
  PolicyTable a = UniformPolicy(tree);
  PolicyTable b = a;
  FillTable(tree, first, player, a);
  FillTable(tree, second, player, b);
  return FromTable(tree, MixPolicies(tree, a, first_weight, b, second_weight, player),
                   player);
}

StepsizeSchedule StepsizeSchedule::Constant(double c) {
  if (!(c > 0 && c <= 1)) {
    throw std::invalid_argument("constant stepsize must lie in (0, 1]");
  }
  return StepsizeSchedule(Kind::kConstant, c);
}

StepsizeSchedule StepsizeSchedule::Parse(const std::string& text) {
  if (text == "harmonic" || text == "1/T" || text == "1/t") return Harmonic();
  std::size_t used = 0;
  double c = 0;
  try {
    c = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) {
    throw std::invalid_argument("stepsize must be 'harmonic' or a number, got '" +
                                text + "'");
  }
  return Constant(c);
}

std::string StepsizeSchedule::ToString() const {
  if (kind_ == Kind::kHarmonic) return "harmonic";
  std::ostringstream os;
  os << constant_;
  return os.str();
}

XfpResult RunXfp(const game::GameSpec& spec, const XfpOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("XFP needs iterations >= 1");
  if (options.eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (!(options.br_noise >= 0 && options.br_noise <= 1)) {
    throw std::invalid_argument("best-response noise must lie in [0, 1]");
  }
  const GameTree& tree = TreeFor(spec);
  XfpResult result;
  result.average = UniformPolicy(tree);
  const bool parallel = WorkerThreads() > 1;

  for (int t = 1; t <= options.iterations; ++t) {
    const PolicyTable& avg = result.average;
    std::array<PolicyTable, kNumPlayers> responses{avg, avg};
    auto respond = [&](int p) {
      std::seed_seq seq{options.seed, static_cast<std::uint64_t>(t),
                        static_cast<std::uint64_t>(p)};
      game::Rng rng(seq);
      BestResponse(tree, avg, p, responses[p], options.br_noise, &rng);
    };
    if (parallel) {
      auto other = std::async(std::launch::async, respond, 1);
      respond(0);
      other.get();
    } else {
      respond(0);
      respond(1);
    }
    const double step = options.schedule(t);
    PolicyTable next = MixPolicies(tree, avg, 1.0 - step, responses[0], step, 0);
    const PolicyTable mixed1 =
        MixPolicies(tree, avg, 1.0 - step, responses[1], step, 1);
    for (int id : tree.PlayerInfosets(1)) next[id] = mixed1[id];
    result.average = std::move(next);

    if (t == 1 || t % options.eval_every == 0 || t == options.iterations) {
      result.curve.push_back({t, Exploitability(tree, result.average)});
    }
  }
  return result;
}

}  // namespace nfsp::exact
