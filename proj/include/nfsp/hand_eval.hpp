#pragma once

#include <cstdint>
#include <span>

namespace nfsp::game {

// Standard poker hand ranking over 5 to 7 cards. Cards are indexed
// rank * 4 + suit with rank 0 = deuce ... 12 = ace.
//
// The result packs the category (0 = high card ... 8 = straight flush) in
// bits 20..23 and up to five tie-breaking ranks in 4-bit nibbles below it,
// so larger values win and equal values split.
std::uint32_t EvaluateHand(std::span<const int> cards);

enum class HandCategory : int {
  kHighCard = 0,
  kPair,
  kTwoPair,
  kTrips,
  kStraight,
  kFlush,
  kFullHouse,
  kQuads,
  kStraightFlush,
};

inline HandCategory CategoryOf(std::uint32_t value) {
  return static_cast<HandCategory>(value >> 20);
}

}  // namespace nfsp::game
