#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "nfsp/game.hpp"
#include "nfsp/memory.hpp"

using namespace nfsp::memory;

namespace {

double ChiSquarePValue(const std::vector<double>& observed, double expected) {
  double stat = 0;
  for (double o : observed) stat += (o - expected) * (o - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("reservoir below capacity keeps everything") {
  Reservoir<int> r(100, 1);
  for (int i = 0; i < 50; ++i) r.Push(i);
  std::vector<int> got = r.Contents();
  std::vector<int> want(50);
  std::iota(want.begin(), want.end(), 0);
  CHECK(got == want);
  CHECK(r.seen() == 50);
}

TEST_CASE("circular buffer keeps the most recent items") {
  CircularBuffer<int> c(3);
  for (int i = 0; i < 5; ++i) c.Push(i);
  CHECK(c.Contents() == std::vector<int>{2, 3, 4});
  CHECK(c.size() == 3);
  CHECK(c.seen() == 5);
  CHECK(c.At(0) == 2);
}

TEST_CASE("reservoir membership is uniform over the stream") {
  // 10000 items into 100 slots, 1000 trials; count survivors per block of 100
  // consecutive items. Each block expects 1000 * 100 * 100 / 10000 = 1000.
  std::vector<double> blocks(100, 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Reservoir<int> r(100, 1000 + trial);
    for (int i = 0; i < 10000; ++i) r.Push(i);
    for (int x : r.Contents()) blocks[x / 100] += 1;
  }
  CHECK(ChiSquarePValue(blocks, 1000.0) > 0.01);
}

TEST_CASE("reservoir inclusion probability is capacity / n") {
  for (int ratio : {2, 10, 100}) {
    const int capacity = 50;
    const int n = capacity * ratio;
    const int trials = 3000;
    std::vector<double> hits(n, 0.0);
    for (int trial = 0; trial < trials; ++trial) {
      Reservoir<int> r(capacity, 77 * ratio + trial);
      for (int i = 0; i < n; ++i) r.Push(i);
      for (int x : r.Contents()) hits[x] += 1;
    }
    const double p = static_cast<double>(capacity) / n;
    // First and last tenth of the stream, pooled.
    const int tenth = n / 10;
    double first = 0, last = 0;
    for (int i = 0; i < tenth; ++i) {
      first += hits[i];
      last += hits[n - 1 - i];
    }
    const double draws = static_cast<double>(tenth) * trials;
    const double sigma = std::sqrt(draws * p * (1 - p));
    CAPTURE(ratio);
    CHECK(std::abs(first - draws * p) < 5 * sigma);
    CHECK(std::abs(last - draws * p) < 5 * sigma);
  }
}

TEST_CASE("floored reservoir favours recent items") {
  std::vector<double> old_hits(2, 0.0);
  for (int trial = 0; trial < 300; ++trial) {
    ExpReservoir<int> e(100, 0.25, trial);
    Reservoir<int> r(100, trial);
    for (int i = 0; i < 10000; ++i) {
      e.Push(i);
      r.Push(i);
    }
    for (int x : e.Contents()) old_hits[0] += x < 5000;
    for (int x : r.Contents()) old_hits[1] += x < 5000;
  }
  CHECK(old_hits[0] < 0.1 * old_hits[1]);
  CHECK_THROWS_AS(ExpReservoir<int>(10, 1.5, 0), std::invalid_argument);
}

TEST_CASE("sampling is uniform with replacement") {
  CircularBuffer<int> c(20);
  for (int i = 0; i < 20; ++i) c.Push(i);
  std::mt19937_64 rng(5);
  std::vector<double> counts(20, 0.0);
  for (int x : c.Sample(40000, rng)) counts[x] += 1;
  CHECK(ChiSquarePValue(counts, 2000.0) > 0.01);
  // With replacement: more draws than items is fine.
  CircularBuffer<int> one(5);
  one.Push(9);
  CHECK(one.Sample(3, rng) == std::vector<int>{9, 9, 9});
}

TEST_CASE("empty memories refuse to sample") {
  std::mt19937_64 rng(0);
  for (auto kind : {MemoryKind::kCircular, MemoryKind::kReservoir, MemoryKind::kExponential}) {
    ReplayMemory<int> m(kind, 10, 0.25, 0);
    CHECK_THROWS_AS(m.Sample(1, rng), EmptyMemoryError);
  }
  CHECK_THROWS_AS(CircularBuffer<int>(0), std::invalid_argument);
}

TEST_CASE("memory kind names") {
  CHECK(ParseMemoryKind("sliding") == MemoryKind::kCircular);
  for (auto kind : {MemoryKind::kCircular, MemoryKind::kReservoir, MemoryKind::kExponential}) {
    CHECK(ParseMemoryKind(MemoryKindName(kind)) == kind);
  }
  CHECK_THROWS_AS(ParseMemoryKind("lru"), std::invalid_argument);
}

TEST_CASE("a batch of leduc behaviour tuples unpacks to 128 x 30") {
  const auto& spec = nfsp::game::LeducSpec();
  std::mt19937_64 rng(3);
  ReplayMemory<BehaviourTuple> m(MemoryKind::kReservoir, 1000, 0, 1);
  for (int i = 0; i < 300; ++i) {
    nfsp::game::GameState s(spec);
    s.SampleChance(rng);
    m.Push({s.EncodeBits(0), 1, s.LegalMask()});
  }
  const auto batch = m.Sample(128, rng);
  REQUIRE(batch.size() == 128);
  std::vector<float> row(spec.EncodingSize());
  for (const auto& t : batch) {
    nfsp::game::UnpackEncoding(t.state, row);
    CHECK(std::accumulate(row.begin(), row.end(), 0.0f) == 1.0f);
  }
  CHECK(row.size() == 30);
}
