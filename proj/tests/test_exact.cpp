#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nfsp/exact.hpp"
#include "nfsp/strategy_io.hpp"
#include "oracles/kuhn_oracle.hpp"
#include "oracles/leduc_oracle.hpp"
#include "oracles/matrix_game.hpp"
#include "test_util.hpp"

using namespace nfsp::exact;
using nfsp::game::KuhnSpec;
using nfsp::game::LeducSpec;

namespace {

constexpr int kKuhnCap = 1;
constexpr int kLeducCap = 2;

double LeducValue0(const BehaviouralStrategy& s0, const BehaviouralStrategy& s1) {
  const auto dist = oracle::leduc::TerminalDistribution(testutil::Lookup(s0, kLeducCap),
                                                        testutil::Lookup(s1, kLeducCap));
  const auto terminals = oracle::leduc::AllTerminals();
  double v = 0;
  for (const auto& t : terminals) {
    v += dist.at(std::to_string(t.c0) + "," + std::to_string(t.c1) + "," +
                 std::to_string(t.board) + ":" + t.betting) *
         t.payoff0;
  }
  return v;
}

StrategyProfile RandomProfile(const nfsp::game::GameSpec& spec, std::mt19937_64& rng) {
  return {testutil::RandomStrategy(spec, 0, rng), testutil::RandomStrategy(spec, 1, rng)};
}

}  // namespace

TEST_CASE("kuhn: best response equals the best of all 64 pure strategies") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto profile = RandomProfile(KuhnSpec(), rng);
    for (int p = 0; p < 2; ++p) {
      const auto br = ComputeBestResponse(KuhnSpec(), profile, p);
      const double brute =
          oracle::kuhn::BruteForceBestResponse(p, testutil::Lookup(profile[1 - p], kKuhnCap));
      CHECK(br.value == doctest::Approx(brute).epsilon(1e-9));
      // The returned strategy achieves the value it reports.
      StrategyProfile with_br = profile;
      with_br[p] = br.strategy;
      const double achieved = ExpectedPayoff(KuhnSpec(), with_br)[p];
      CHECK(achieved == doctest::Approx(br.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("kuhn: uniform profile") {
  const StrategyProfile uniform{UniformStrategy(KuhnSpec(), 0), UniformStrategy(KuhnSpec(), 1)};
  const auto u = testutil::Lookup(uniform[0], kKuhnCap);
  const auto v = testutil::Lookup(uniform[1], kKuhnCap);
  const double expected = 0.5 * (oracle::kuhn::BruteForceBestResponse(0, v) +
                                 oracle::kuhn::BruteForceBestResponse(1, u));
  CHECK(expected == doctest::Approx(0.458333).epsilon(1e-5));
  CHECK(Exploitability(KuhnSpec(), uniform) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ExpectedPayoff(KuhnSpec(), uniform)[0] ==
        doctest::Approx(oracle::kuhn::Value0(u, v)).epsilon(1e-12));
}

TEST_CASE("leduc: best response dominates random strategies and matches the rules script") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto profile = RandomProfile(LeducSpec(), rng);
    const double v0 = LeducValue0(profile[0], profile[1]);
    CHECK(ExpectedPayoff(LeducSpec(), profile)[0] == doctest::Approx(v0).epsilon(1e-9));
    for (int p = 0; p < 2; ++p) {
      const auto br = ComputeBestResponse(LeducSpec(), profile, p);
      StrategyProfile with_br = profile;
      with_br[p] = br.strategy;
      const double achieved =
          p == 0 ? LeducValue0(with_br[0], with_br[1]) : -LeducValue0(with_br[0], with_br[1]);
      CHECK(achieved == doctest::Approx(br.value).epsilon(1e-9));
      for (int k = 0; k < 20; ++k) {
        StrategyProfile other = profile;
        other[p] = testutil::RandomStrategy(LeducSpec(), p, rng, k % 2 == 0);
        CHECK(ExpectedPayoff(LeducSpec(), other)[p] <= br.value + 1e-12);
      }
    }
  }
}

TEST_CASE("noisy best response") {
  std::mt19937_64 rng(4);
  const auto profile = RandomProfile(LeducSpec(), rng);
  SUBCASE("noise 1 is uniform") {
    const auto br = ComputeBestResponse(LeducSpec(), profile, 0, 1.0, 9);
    CHECK(br.strategy == UniformStrategy(LeducSpec(), 0));
  }
  SUBCASE("noise 0 is deterministic and pure") {
    const auto a = ComputeBestResponse(LeducSpec(), profile, 1, 0.0, 1);
    const auto b = ComputeBestResponse(LeducSpec(), profile, 1, 0.0, 2);
    CHECK(a.strategy == b.strategy);
    for (const auto& [key, row] : a.strategy) {
      int ones = 0;
      for (double x : row) ones += x == 1.0;
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("mixing is realization-equivalent") {
  std::mt19937_64 rng(3);
  auto check = [&](const nfsp::game::GameSpec& spec, int trials) {
    const bool kuhn = &spec == &KuhnSpec();
    const int cap = kuhn ? kKuhnCap : kLeducCap;
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < trials; ++trial) {
      const int p = trial % 2;
      const auto a = testutil::RandomStrategy(spec, p, rng, trial % 3 == 0);
      const auto b = testutil::RandomStrategy(spec, p, rng, trial % 4 == 0);
      const auto opp = testutil::RandomStrategy(spec, 1 - p, rng);
      const double w = u(rng);
      const auto mix = MixStrategies(spec, a, w, b, 1 - w, p);
      auto dist = [&](const BehaviouralStrategy& mine) {
        const auto me = testutil::Lookup(mine, cap);
        const auto them = testutil::Lookup(opp, cap);
        return kuhn ? (p == 0 ? oracle::kuhn::TerminalDistribution(me, them)
                              : oracle::kuhn::TerminalDistribution(them, me))
                    : (p == 0 ? oracle::leduc::TerminalDistribution(me, them)
                              : oracle::leduc::TerminalDistribution(them, me));
      };
      const auto da = dist(a), db = dist(b), dm = dist(mix);
      for (const auto& [key, prob] : dm) {
        CHECK(std::abs(prob - (w * da.at(key) + (1 - w) * db.at(key))) < 1e-12);
      }
    }
  };
  check(KuhnSpec(), 50);
  check(LeducSpec(), 10);
}

TEST_CASE("realization weights are products along the player's own path") {
  std::mt19937_64 rng(6);
  const auto s = testutil::RandomStrategy(KuhnSpec(), 0, rng);
  const auto x = ComputeRealizationWeights(KuhnSpec(), s, 0);
  for (char card : {'J', 'Q', 'K'}) {
    const std::string k(1, card);
    CHECK(x.at(k) == 1.0);
    // Check then face a bet: reached with the probability of checking.
    CHECK(x.at(k + "cr") == doctest::Approx(s.at(k)[0]));
  }
}

TEST_CASE("certified Nash epsilon scales with exploitability") {
  CHECK(CertifiedNashEpsilon(0.5) == doctest::Approx(0.25));
  CHECK(CertifiedNashEpsilon(0.25) == doctest::Approx(CertifiedNashEpsilon(0.5) / 2));
  // The certificate holds: no player gains more than the summed deviation gains.
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto profile = RandomProfile(LeducSpec(), rng);
    const double e = Exploitability(LeducSpec(), profile);
    const auto u = ExpectedPayoff(LeducSpec(), profile);
    double gains = 0;
    for (int p = 0; p < 2; ++p) {
      const double gain = ComputeBestResponse(LeducSpec(), profile, p).value - u[p];
      CHECK(gain >= -1e-12);
      gains += gain;
    }
    CHECK(gains == doctest::Approx(2 * e).epsilon(1e-9));
  }
}

TEST_CASE("kuhn: fictitious play reaches the minimax value") {
  XfpOptions opt;
  opt.iterations = 100000;
  opt.eval_every = 100000;
  const auto result = RunXfp(KuhnSpec(), opt);
  const auto& tree = TreeFor(KuhnSpec());
  const auto profile = ProfileFromTable(tree, result.average);
  CHECK(Exploitability(KuhnSpec(), profile) <= 1e-3);
  const auto bracket = oracle::SolveMatrixGame(oracle::kuhn::PayoffMatrix(), 20000);
  REQUIRE(bracket.upper - bracket.lower < 1e-3);
  const double v = ExpectedPayoff(KuhnSpec(), profile)[0];
  CHECK(v >= bracket.lower - 1e-3);
  CHECK(v <= bracket.upper + 1e-3);
  CHECK(v == doctest::Approx(-1.0 / 18).epsilon(0.02));
}

TEST_CASE("leduc: fictitious play exploitability falls") {
  XfpOptions opt;
  opt.iterations = 200;
  opt.eval_every = 50;
  const auto result = RunXfp(LeducSpec(), opt);
  REQUIRE(result.curve.size() == 5);
  CHECK(result.curve.front().iteration == 1);
  CHECK(result.curve.back().iteration == 200);
  CHECK(result.curve.back().exploitability < result.curve.front().exploitability);
  CHECK(result.curve.back().exploitability < 0.3);
}

TEST_CASE("xfp is deterministic for a seed") {
  XfpOptions opt;
  opt.iterations = 30;
  opt.br_noise = 0.2;
  opt.seed = 12;
  const auto a = RunXfp(LeducSpec(), opt);
  const auto b = RunXfp(LeducSpec(), opt);
  CHECK(a.average == b.average);
}

TEST_CASE("stepsize parsing") {
  CHECK(StepsizeSchedule::Parse("harmonic").kind() == StepsizeSchedule::Kind::kHarmonic);
  CHECK(StepsizeSchedule::Parse("harmonic")(4) == doctest::Approx(0.25));
  CHECK(StepsizeSchedule::Parse("0.1")(7) == doctest::Approx(0.1));
  CHECK_THROWS_AS(StepsizeSchedule::Parse("0"), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::Parse("1.5"), std::invalid_argument);
  CHECK_THROWS_AS(StepsizeSchedule::Parse("fast"), std::invalid_argument);
}

TEST_CASE("strategy validation and json round trip") {
  std::mt19937_64 rng(10);
  const auto profile = RandomProfile(LeducSpec(), rng);
  std::stringstream ss;
  nfsp::exact::WriteStrategyJson(ss, profile);
  const auto back = nfsp::exact::ReadStrategyJson(ss, LeducSpec());
  for (int p = 0; p < 2; ++p) {
    REQUIRE(back[p].size() == profile[p].size());
    for (const auto& [key, row] : profile[p]) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        CHECK(back[p].at(key)[i] == doctest::Approx(row[i]).epsilon(1e-15));
      }
    }
  }
  auto broken = profile;
  broken[0].erase(broken[0].begin());
  CHECK_THROWS_AS(Exploitability(LeducSpec(), broken), StrategyError);
  broken = profile;
  broken[1].begin()->second[0] += 0.5;
  CHECK_THROWS_AS(Exploitability(LeducSpec(), broken), StrategyError);
}
