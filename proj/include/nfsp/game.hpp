#pragma once

// Two-player limit poker engines (Kuhn, Leduc, heads-up Limit Hold'em)
// behind one value-type state, plus the information-state key and the
// fixed-length k-of-n / betting-tensor encoding used as network input.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nfsp::game {

using Rng = std::mt19937_64;

inline constexpr int kNumPlayers = 2;
inline constexpr int kNumActions = 3;
inline constexpr int kChancePlayer = -1;
inline constexpr int kTerminalPlayer = -2;

// Checking is a Call with nothing to call, betting is a Raise.
enum class Action : std::uint8_t { kFold = 0, kCall = 1, kRaise = 2 };

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kFold, Action::kCall, Action::kRaise};

inline constexpr int ActionIndex(Action a) { return static_cast<int>(a); }
char ActionChar(Action a);
std::string_view ActionName(Action a);

class ActionMask {
 public:
  constexpr ActionMask() = default;
  constexpr explicit ActionMask(std::uint8_t bits) : bits_(bits) {}

  constexpr bool Contains(Action a) const {
    return (bits_ >> ActionIndex(a)) & 1u;
  }
  constexpr void Set(Action a) { bits_ |= std::uint8_t(1u << ActionIndex(a)); }
  constexpr int Count() const {
    return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1);
  }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  std::vector<Action> Actions() const;

  friend constexpr bool operator==(ActionMask, ActionMask) = default;

 private:
  std::uint8_t bits_ = 0;
};

enum class GameId { kKuhn, kLeduc, kLimitHoldem };

// Static rules of one game. Chips are integers in the game's smallest unit
// (Kuhn/Leduc: the ante, Limit Hold'em: the small blind).
struct GameSpec {
  GameId id;
  std::string name;
  int num_ranks;
  int num_suits;
  int num_rounds;
  int hole_cards;                  // private cards per player
  std::vector<int> board_cards;    // public cards revealed when round r starts
  int max_raises;                  // per round
  std::vector<int> raise_size;     // chips per raise, per round
  std::array<int, kNumPlayers> forced_bets;
  std::vector<int> first_player;   // first to act, per round
  bool fold_requires_bet;
  bool rank_only_cards;            // suits are irrelevant and not encoded
  int big_blind;                   // chips per big blind, for mbb/h
  std::string rank_chars;
  std::string suit_chars;

  int DeckSize() const { return num_ranks * num_suits; }
  int TotalBoardCards() const;
  // Width of one k-of-n card block: ranks for rank-only games, else cards.
  int CardBlockSize() const { return rank_only_cards ? num_ranks : DeckSize(); }
  int CardSectionSize() const { return num_rounds * CardBlockSize(); }
  // player x round x raises-so-far x {call, raise}
  int BettingSectionSize() const {
    return kNumPlayers * num_rounds * (max_raises + 1) * 2;
  }
  int EncodingSize() const { return CardSectionSize() + BettingSectionSize(); }
  int BettingCell(int player, int round, int raises_before, Action a) const;
  // Small games admit full-width traversal; Limit Hold'em does not.
  bool Enumerable() const { return id != GameId::kLimitHoldem; }
};

const GameSpec& KuhnSpec();
const GameSpec& LeducSpec();
const GameSpec& LimitHoldemSpec();
// "kuhn", "leduc", "lhe"; throws std::invalid_argument otherwise.
const GameSpec& GameSpecByName(std::string_view name);

inline int CardRank(const GameSpec& spec, int card) {
  return card / spec.num_suits;
}
inline int CardSuit(const GameSpec& spec, int card) {
  return card % spec.num_suits;
}
// Rank character, followed by the suit character when suits matter.
std::string CardString(const GameSpec& spec, int card);

// Comparable showdown strength; larger wins.
std::uint32_t ShowdownStrength(const GameSpec& spec, std::span<const int> hole,
                               std::span<const int> board);

struct BetRecord {
  int round;
  int player;
  Action action;
  int raises_before;
};

inline constexpr int kMaxEncodingWords = 5;  // 320 bits >= 288
using EncodingBits = std::array<std::uint64_t, kMaxEncodingWords>;

void UnpackEncoding(const EncodingBits& bits, std::span<float> out);

struct InfoState {
  int player = 0;
  std::string key;
  std::vector<float> encoding;
  ActionMask legal;
};

class GameState {
 public:
  // Root chance node; the next chance resolution deals the hole cards.
  explicit GameState(const GameSpec& spec);

  const GameSpec& spec() const { return *spec_; }
  bool IsChance() const { return phase_ == Phase::kChance; }
  bool IsTerminal() const { return phase_ == Phase::kTerminal; }
  bool IsDecision() const { return phase_ == Phase::kBetting; }
  int CurrentPlayer() const;
  int round() const { return round_; }
  int raises() const { return raises_; }
  const std::vector<BetRecord>& history() const { return history_; }
  const std::array<int, kNumPlayers>& contributions() const {
    return contrib_;
  }

  ActionMask LegalMask() const;
  std::vector<Action> LegalActions() const;
  void Apply(Action a);
  GameState Child(Action a) const;

  // Chance handling. Hole deals list player 0's cards before player 1's.
  int CardsNeeded() const;
  bool DealingHoleCards() const { return num_dealt_ == 0; }
  std::vector<std::pair<GameState, double>> ChanceOutcomes() const;
  void DealCards(std::span<const int> cards);
  void SampleChance(Rng& rng);

  std::array<int, kNumPlayers> Payoffs() const;

  std::span<const int> HoleCards(int player) const;
  std::span<const int> BoardCards() const;

  std::string InfoStateKey(int player) const;
  EncodingBits EncodeBits(int player) const;
  std::vector<float> Encode(int player) const;
  InfoState Information(int player) const;

  std::string ToString() const;

 private:
  enum class Phase : std::uint8_t { kChance, kBetting, kTerminal };
  static constexpr int kMaxCards = 9;

  void StartBettingRound();
  void CloseRound();
  bool CardUsed(int card) const;

  const GameSpec* spec_;
  std::array<int, kMaxCards> cards_{};  // hole p0, hole p1, board
  int num_dealt_ = 0;
  std::vector<BetRecord> history_;
  std::array<int, kNumPlayers> contrib_{};
  Phase phase_ = Phase::kChance;
  int round_ = 0;
  int raises_ = 0;
  int actions_in_round_ = 0;
  int to_act_ = 0;
  int folder_ = -1;
};

// Decomposition of an information-state key.
struct InfoKeyParts {
  std::vector<int> hole;   // rank indices (rank-only games) or card indices
  std::vector<int> board;
  std::vector<std::string> betting;  // one action string per round reached
};

// Throws std::invalid_argument on malformed keys.
InfoKeyParts ParseInfoKey(const GameSpec& spec, std::string_view key);
// Encoding reconstructed from the key alone.
std::vector<float> EncodeInfoKey(const GameSpec& spec, std::string_view key);
// Player to act at the information state named by the key.
int PlayerFromInfoKey(const GameSpec& spec, std::string_view key);

}  // namespace nfsp::game
