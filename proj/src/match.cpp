#include "nfsp/match.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "nfsp/threads.hpp"

namespace nfsp::harness {

using game::Action;
using game::ActionIndex;

std::array<double, game::kNumActions> ScriptedPolicy::Probabilities(
    const game::GameState& state) const {
  const auto legal = state.LegalMask();
  std::array<double, game::kNumActions> p{};
  auto pick = [&](Action a) {
    p[ActionIndex(legal.Contains(a) ? a : Action::kCall)] = 1.0;
  };
  switch (kind_) {
    case Scripted::kAlwaysFold:
      pick(Action::kFold);
      break;
    case Scripted::kAlwaysCall:
      pick(Action::kCall);
      break;
    case Scripted::kAlwaysRaise:
      pick(Action::kRaise);
      break;
    case Scripted::kUniform:
      for (Action a : legal.Actions()) p[ActionIndex(a)] = 1.0 / legal.Count();
      break;
  }
  return p;
}

std::string ScriptedPolicy::name() const {
  switch (kind_) {
    case Scripted::kAlwaysFold:
      return "always_fold";
    case Scripted::kAlwaysCall:
      return "always_call";
    case Scripted::kAlwaysRaise:
      return "always_raise";
    case Scripted::kUniform:
      return "uniform";
  }
  return "?";
}

std::unique_ptr<Policy> MakeScripted(const std::string& name) {
  if (name == "always_fold") return std::make_unique<ScriptedPolicy>(Scripted::kAlwaysFold);
  if (name == "always_call") return std::make_unique<ScriptedPolicy>(Scripted::kAlwaysCall);
  if (name == "always_raise") {
    return std::make_unique<ScriptedPolicy>(Scripted::kAlwaysRaise);
  }
  if (name == "uniform" || name == "random") {
    return std::make_unique<ScriptedPolicy>(Scripted::kUniform);
  }
  throw std::invalid_argument("unknown scripted policy '" + name + "'");
}

std::array<double, game::kNumActions> TabularPolicy::Probabilities(
    const game::GameState& state) const {
  const int player = state.CurrentPlayer();
  const std::string key = state.InfoStateKey(player);
  const auto& table = profile_[player];
  auto it = table.find(key);
  if (it == table.end()) throw exact::StrategyError(key, "strategy has no entry");
  const auto legal = state.LegalMask();
  if (static_cast<int>(it->second.size()) != legal.Count()) {
    throw exact::StrategyError(key, "wrong number of probabilities");
  }
  std::array<double, game::kNumActions> p{};
  std::size_t k = 0;
  for (Action a : legal.Actions()) p[ActionIndex(a)] = it->second[k++];
  return p;
}

std::array<double, game::kNumActions> NetworkPolicy::Probabilities(
    const game::GameState& state) const {
  const int player = state.CurrentPlayer();
  const auto legal = state.LegalMask();
  const auto logits = nets_[player].Predict(state.Encode(player));
  std::array<double, game::kNumActions> p{};
  if (greedy_) {
    int best = -1;
    for (Action a : legal.Actions()) {
      const int k = ActionIndex(a);
      if (best < 0 || logits[k] > logits[best]) best = k;
    }
    p[best] = 1.0;
  } else {
    const auto soft = neural::MaskedSoftmax<float>(logits, legal);
    std::copy(soft.begin(), soft.end(), p.begin());
  }
  return p;
}

int PlayHand(const game::GameSpec& spec, const Policy& seat0, const Policy& seat1,
             const std::vector<int>& deck, game::Rng& rng) {
  game::GameState state(spec);
  std::size_t next_card = 0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (!state.IsTerminal()) {
    if (state.IsChance()) {
      const int n = state.CardsNeeded();
      state.DealCards(std::span<const int>(deck.data() + next_card, n));
      next_card += n;
      continue;
    }
    const Policy& policy = state.CurrentPlayer() == 0 ? seat0 : seat1;
    const auto p = policy.Probabilities(state);
    const auto legal = state.LegalMask();
    const double u = coin(rng);
    double acc = 0;
    Action chosen = legal.Actions().back();
    for (Action a : legal.Actions()) {
      acc += p[ActionIndex(a)];
      if (u < acc) {
        chosen = a;
        break;
      }
    }
    state.Apply(chosen);
  }
  return state.Payoffs()[0];
}

namespace {

std::vector<int> Shuffled(const game::GameSpec& spec, game::Rng& rng) {
  std::vector<int> deck(spec.DeckSize());
  std::iota(deck.begin(), deck.end(), 0);
  // Explicit Fisher-Yates: std::shuffle is not specified identically across
  // standard libraries.
  for (std::size_t i = deck.size() - 1; i > 0; --i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i)(rng);
    std::swap(deck[i], deck[j]);
  }
  return deck;
}

// Score in mbb for the first policy of unit `index` (a duplicate pair or a
// single hand).
double PlayUnit(const game::GameSpec& spec, const Policy& first, const Policy& second,
                const MatchOptions& options, std::uint64_t index) {
  std::seed_seq seq{options.seed, index};
  game::Rng rng(seq);
  const double to_mbb = 1000.0 / spec.big_blind;
  auto deck = Shuffled(spec, rng);
  if (options.duplicate) {
    const int a = PlayHand(spec, first, second, deck, rng);
    const int b = -PlayHand(spec, second, first, deck, rng);
    return 0.5 * (a + b) * to_mbb;
  }
  if (index % 2 == 0) return PlayHand(spec, first, second, deck, rng) * to_mbb;
  return -PlayHand(spec, second, first, deck, rng) * to_mbb;
}

}  // namespace

MatchResult RunMatch(const game::GameSpec& spec, const Policy& first,
                     const Policy& second, const MatchOptions& options) {
  if (options.hands == 0) throw std::invalid_argument("a match needs hands > 0");
  if (options.duplicate && options.hands % 2 != 0) {
    throw std::invalid_argument("duplicate matches need an even number of hands");
  }
  const std::uint64_t units = options.duplicate ? options.hands / 2 : options.hands;
  std::vector<double> scores(units);
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(WorkerThreads(), units));
  auto run = [&](int w) {
    for (std::uint64_t u = w; u < units; u += workers) {
      scores[u] = PlayUnit(spec, first, second, options, u);
    }
  };
  std::vector<std::future<void>> jobs;
  for (int w = 1; w < workers; ++w) jobs.push_back(std::async(std::launch::async, run, w));
  run(0);
  for (auto& j : jobs) j.get();

  // Fixed-order reduction keeps results independent of the thread count.
  double mean = 0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(units);
  double var = 0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var = units > 1 ? var / static_cast<double>(units - 1) : 0.0;
  return {options.hands, mean, std::sqrt(var / static_cast<double>(units))};
}

}  // namespace nfsp::harness
