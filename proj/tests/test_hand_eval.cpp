#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "nfsp/hand_eval.hpp"
#include "oracles/hand_oracle.hpp"

using nfsp::game::CategoryOf;
using nfsp::game::EvaluateHand;
using nfsp::game::HandCategory;

namespace {

int Card(int rank, int suit) { return rank * 4 + suit; }

int Sign(long long v) { return (v > 0) - (v < 0); }

}  // namespace

TEST_CASE("named hands") {
  CHECK(CategoryOf(EvaluateHand(std::vector<int>{Card(12, 0), Card(0, 1), Card(1, 2),
                                                 Card(2, 3), Card(3, 0)})) ==
        HandCategory::kStraight);  // wheel
  CHECK(CategoryOf(EvaluateHand(std::vector<int>{Card(8, 2), Card(9, 2), Card(10, 2),
                                                 Card(11, 2), Card(12, 2), Card(0, 0),
                                                 Card(0, 1)})) ==
        HandCategory::kStraightFlush);
  CHECK(CategoryOf(EvaluateHand(std::vector<int>{Card(5, 0), Card(5, 1), Card(5, 2),
                                                 Card(7, 0), Card(7, 1), Card(7, 2),
                                                 Card(1, 3)})) ==
        HandCategory::kFullHouse);
  // Six-high straight beats the wheel.
  CHECK(EvaluateHand(std::vector<int>{Card(0, 0), Card(1, 1), Card(2, 2), Card(3, 3),
                                      Card(4, 0)}) >
        EvaluateHand(std::vector<int>{Card(12, 0), Card(0, 1), Card(1, 2), Card(2, 3),
                                      Card(3, 0)}));
}

TEST_CASE("ordering agrees with brute-force ranking on random 7-card hands") {
  std::mt19937_64 rng(17);
  std::vector<int> deck(52);
  std::iota(deck.begin(), deck.end(), 0);
  for (int trial = 0; trial < 20000; ++trial) {
    std::shuffle(deck.begin(), deck.end(), rng);
    // Shared board, as at a showdown.
    const std::vector<int> a{deck[0], deck[1], deck[4], deck[5], deck[6], deck[7], deck[8]};
    const std::vector<int> b{deck[2], deck[3], deck[4], deck[5], deck[6], deck[7], deck[8]};
    const auto oa = oracle::hands::Best(a);
    const auto ob = oracle::hands::Best(b);
    const int expected = oa < ob ? -1 : (ob < oa ? 1 : 0);
    const long long diff =
        static_cast<long long>(EvaluateHand(a)) - static_cast<long long>(EvaluateHand(b));
    REQUIRE(Sign(diff) == expected);
    CHECK(static_cast<int>(CategoryOf(EvaluateHand(a))) == oa[0]);
  }
}

TEST_CASE("5-card categories agree with the brute-force classifier") {
  std::mt19937_64 rng(23);
  std::vector<int> deck(52);
  std::iota(deck.begin(), deck.end(), 0);
  for (int trial = 0; trial < 20000; ++trial) {
    std::shuffle(deck.begin(), deck.end(), rng);
    const std::vector<int> h(deck.begin(), deck.begin() + 5);
    CHECK(static_cast<int>(CategoryOf(EvaluateHand(h))) == oracle::hands::Rank5(h)[0]);
  }
}
