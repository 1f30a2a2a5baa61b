#include "nfsp/hand_eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace nfsp::game {
namespace {

constexpr int kRanks = 13;
constexpr int kSuits = 4;

// Highest straight in a 13-bit rank mask, as the rank of its top card, or -1.
int TopStraight(std::uint32_t mask) {
  // The ace also plays low.
  std::uint32_t m = (mask << 1) | ((mask >> 12) & 1u);
  for (int top = 13; top >= 4; --top) {
    std::uint32_t run = 0x1Fu << (top - 4);
    if ((m & run) == run) return top - 1;
  }
  return -1;
}

std::uint32_t Pack(HandCategory category, std::initializer_list<int> ranks) {
  std::uint32_t value = static_cast<std::uint32_t>(category) << 20;
  int shift = 16;
  for (int r : ranks) {
    value |= static_cast<std::uint32_t>(r) << shift;
    shift -= 4;
  }
  return value;
}

// Top `n` ranks set in `mask`, highest first, written to `out`.
int TopRanks(std::uint32_t mask, int n, std::array<int, 5>& out) {
  int k = 0;
  for (int r = kRanks - 1; r >= 0 && k < n; --r) {
    if (mask & (1u << r)) out[k++] = r;
  }
  return k;
}

}  // namespace

std::uint32_t EvaluateHand(std::span<const int> cards) {
  if (cards.size() < 5 || cards.size() > 7) {
    throw std::invalid_argument("EvaluateHand needs 5 to 7 cards");
  }
  std::array<int, kRanks> count{};
  std::array<std::uint32_t, kSuits> suit_mask{};
  std::uint32_t rank_mask = 0;
  for (int c : cards) {
    int r = c / kSuits;
    int s = c % kSuits;
    ++count[r];
    suit_mask[s] |= 1u << r;
    rank_mask |= 1u << r;
  }

  for (std::uint32_t m : suit_mask) {
    if (std::popcount(m) >= 5) {
      int sf = TopStraight(m);
      if (sf >= 0) return Pack(HandCategory::kStraightFlush, {sf});
    }
  }

  int quads = -1, trips = -1, second_trips = -1;
  int pair_hi = -1, pair_lo = -1;
  for (int r = kRanks - 1; r >= 0; --r) {
    switch (count[r]) {
      case 4:
        if (quads < 0) quads = r;
        break;
      case 3:
        if (trips < 0) {
          trips = r;
        } else if (second_trips < 0) {
          second_trips = r;
        }
        break;
      case 2:
        if (pair_hi < 0) {
          pair_hi = r;
        } else if (pair_lo < 0) {
          pair_lo = r;
        }
        break;
      default:
        break;
    }
  }

  std::array<int, 5> top{};
  if (quads >= 0) {
    TopRanks(rank_mask & ~(1u << quads), 1, top);
    return Pack(HandCategory::kQuads, {quads, top[0]});
  }
  if (trips >= 0 && (second_trips >= 0 || pair_hi >= 0)) {
    int pair = std::max(second_trips, pair_hi);
    return Pack(HandCategory::kFullHouse, {trips, pair});
  }
  for (std::uint32_t m : suit_mask) {
    if (std::popcount(m) >= 5) {
      TopRanks(m, 5, top);
      return Pack(HandCategory::kFlush, {top[0], top[1], top[2], top[3], top[4]});
    }
  }
  int straight = TopStraight(rank_mask);
  if (straight >= 0) return Pack(HandCategory::kStraight, {straight});
  if (trips >= 0) {
    TopRanks(rank_mask & ~(1u << trips), 2, top);
    return Pack(HandCategory::kTrips, {trips, top[0], top[1]});
  }
  if (pair_hi >= 0 && pair_lo >= 0) {
    TopRanks(rank_mask & ~(1u << pair_hi) & ~(1u << pair_lo), 1, top);
    return Pack(HandCategory::kTwoPair, {pair_hi, pair_lo, top[0]});
  }
  if (pair_hi >= 0) {
    TopRanks(rank_mask & ~(1u << pair_hi), 3, top);
    return Pack(HandCategory::kPair, {pair_hi, top[0], top[1], top[2]});
  }
  TopRanks(rank_mask, 5, top);
  return Pack(HandCategory::kHighCard, {top[0], top[1], top[2], top[3], top[4]});
}

}  // namespace nfsp::game
