#include "nfsp/game.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nfsp/hand_eval.hpp"

namespace nfsp::game {
namespace {

// Chance nodes with more outcomes than this are sampled, never enumerated.
constexpr double kMaxChanceOutcomes = 100000;

GameSpec MakeKuhn() {
  GameSpec s;
  s.id = GameId::kKuhn;
  s.name = "kuhn";
  s.num_ranks = 3;
  s.num_suits = 1;
  s.num_rounds = 1;
  s.hole_cards = 1;
  s.board_cards = {0};
  s.max_raises = 1;
  s.raise_size = {1};
  s.forced_bets = {1, 1};
  s.first_player = {0};
  s.fold_requires_bet = true;
  s.rank_only_cards = true;
  s.big_blind = 1;
  s.rank_chars = "JQK";
  s.suit_chars = "s";
  return s;
}

GameSpec MakeLeduc() {
  GameSpec s;
  s.id = GameId::kLeduc;
  s.name = "leduc";
  s.num_ranks = 3;
  s.num_suits = 2;
  s.num_rounds = 2;
  s.hole_cards = 1;
  s.board_cards = {0, 1};
  s.max_raises = 2;
  s.raise_size = {2, 4};
  s.forced_bets = {1, 1};
  s.first_player = {0, 0};
  s.fold_requires_bet = true;
  s.rank_only_cards = true;
  s.big_blind = 1;
  s.rank_chars = "JQK";
  s.suit_chars = "sh";
  return s;
}

// Player 0 posts the small blind and acts first preflop; the big blind acts
// first on later streets.
GameSpec MakeLimitHoldem() {
  GameSpec s;
  s.id = GameId::kLimitHoldem;
  s.name = "lhe";
  s.num_ranks = 13;
  s.num_suits = 4;
  s.num_rounds = 4;
  s.hole_cards = 2;
  s.board_cards = {0, 3, 1, 1};
  s.max_raises = 4;
  s.raise_size = {2, 2, 4, 4};
  s.forced_bets = {1, 2};
  s.first_player = {0, 1, 1, 1};
  s.fold_requires_bet = false;
  s.rank_only_cards = false;
  s.big_blind = 2;
  s.rank_chars = "23456789TJQKA";
  s.suit_chars = "cdhs";
  return s;
}

double Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls fn(combination) for every k-subset of `pool` in lexicographic order.
template <class Fn>
void ForEachCombination(const std::vector<int>& pool, int k, Fn&& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> combo(k);
  const int n = static_cast<int>(pool.size());
  if (k > n) return;
  while (true) {
    for (int i = 0; i < k; ++i) combo[i] = pool[idx[i]];
    fn(combo);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void SetBit(EncodingBits& bits, int i) {
  bits[i / 64] |= std::uint64_t{1} << (i % 64);
}

std::string SortedCardString(const GameSpec& spec, std::span<const int> cards) {
  std::vector<int> sorted(cards.begin(), cards.end());
  std::sort(sorted.rbegin(), sorted.rend());
  std::string out;
  for (int c : sorted) out += CardString(spec, c);
  return out;
}

}  // namespace

char ActionChar(Action a) {
  switch (a) {
    case Action::kFold:
      return 'f';
    case Action::kCall:
      return 'c';
    case Action::kRaise:
      return 'r';
  }
  return '?';
}

std::string_view ActionName(Action a) {
  switch (a) {
    case Action::kFold:
      return "Fold";
    case Action::kCall:
      return "Call";
    case Action::kRaise:
      return "Raise";
  }
  return "?";
}

std::vector<Action> ActionMask::Actions() const {
  std::vector<Action> out;
  for (Action a : kAllActions) {
    if (Contains(a)) out.push_back(a);
  }
  return out;
}

int GameSpec::TotalBoardCards() const {
  return std::accumulate(board_cards.begin(), board_cards.end(), 0);
}

int GameSpec::BettingCell(int player, int round, int raises_before,
                          Action a) const {
  return ((player * num_rounds + round) * (max_raises + 1) + raises_before) * 2 +
         (a == Action::kRaise ? 1 : 0);
}

const GameSpec& KuhnSpec() {
  static const GameSpec spec = MakeKuhn();
  return spec;
}

const GameSpec& LeducSpec() {
  static const GameSpec spec = MakeLeduc();
  return spec;
}

const GameSpec& LimitHoldemSpec() {
  static const GameSpec spec = MakeLimitHoldem();
  return spec;
}

const GameSpec& GameSpecByName(std::string_view name) {
  if (name == "kuhn") return KuhnSpec();
  if (name == "leduc") return LeducSpec();
  if (name == "lhe" || name == "limit_holdem") return LimitHoldemSpec();
  throw std::invalid_argument("unknown game '" + std::string(name) +
                              "' (expected kuhn, leduc or lhe)");
}

std::string CardString(const GameSpec& spec, int card) {
  std::string s(1, spec.rank_chars[CardRank(spec, card)]);
  if (!spec.rank_only_cards) s += spec.suit_chars[CardSuit(spec, card)];
  return s;
}

std::uint32_t ShowdownStrength(const GameSpec& spec, std::span<const int> hole,
                               std::span<const int> board) {
  switch (spec.id) {
    case GameId::kKuhn:
      return CardRank(spec, hole[0]);
    case GameId::kLeduc: {
      const int rank = CardRank(spec, hole[0]);
      const bool pair = CardRank(spec, board[0]) == rank;
      return pair ? spec.num_ranks + rank : rank;
    }
    case GameId::kLimitHoldem: {
      std::array<int, 7> cards{};
      std::copy(hole.begin(), hole.end(), cards.begin());
      std::copy(board.begin(), board.end(), cards.begin() + hole.size());
      return EvaluateHand(
          std::span<const int>(cards.data(), hole.size() + board.size()));
    }
  }
  return 0;
}

void UnpackEncoding(const EncodingBits& bits, std::span<float> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>((bits[i / 64] >> (i % 64)) & 1u);
  }
}

GameState::GameState(const GameSpec& spec) : spec_(&spec) {
  contrib_ = spec.forced_bets;
}

int GameState::CurrentPlayer() const {
  switch (phase_) {
    case Phase::kChance:
      return kChancePlayer;
    case Phase::kTerminal:
      return kTerminalPlayer;
    case Phase::kBetting:
      return to_act_;
  }
  return kTerminalPlayer;
}

ActionMask GameState::LegalMask() const {
  if (phase_ != Phase::kBetting) {
    throw std::logic_error("legal actions queried at a non-decision node");
  }
  ActionMask mask;
  const bool facing_bet = contrib_[to_act_] < std::max(contrib_[0], contrib_[1]);
  if (facing_bet || !spec_->fold_requires_bet) mask.Set(Action::kFold);
  mask.Set(Action::kCall);
  if (raises_ < spec_->max_raises) mask.Set(Action::kRaise);
  return mask;
}

std::vector<Action> GameState::LegalActions() const {
  return LegalMask().Actions();
}

void GameState::Apply(Action a) {
  if (!LegalMask().Contains(a)) {
    throw std::logic_error("illegal action " + std::string(ActionName(a)) +
                           " at " + ToString());
  }
  const int p = to_act_;
  history_.push_back({round_, p, a, raises_});
  const int high = std::max(contrib_[0], contrib_[1]);
  switch (a) {
    case Action::kFold:
      folder_ = p;
      phase_ = Phase::kTerminal;
      return;
    case Action::kCall:
      contrib_[p] = high;
      ++actions_in_round_;
      if (actions_in_round_ >= 2) {
        CloseRound();
        return;
      }
      break;
    case Action::kRaise:
      contrib_[p] = high + spec_->raise_size[round_];
      ++raises_;
      ++actions_in_round_;
      break;
  }
  to_act_ = 1 - p;
}

GameState GameState::Child(Action a) const {
  GameState next = *this;
  next.Apply(a);
  return next;
}

void GameState::CloseRound() {
  if (round_ + 1 < spec_->num_rounds) {
    ++round_;
    if (spec_->board_cards[round_] > 0) {
      phase_ = Phase::kChance;
    } else {
      StartBettingRound();
    }
  } else {
    phase_ = Phase::kTerminal;
  }
}

void GameState::StartBettingRound() {
  raises_ = 0;
  actions_in_round_ = 0;
  to_act_ = spec_->first_player[round_];
  phase_ = Phase::kBetting;
}

int GameState::CardsNeeded() const {
  if (phase_ != Phase::kChance) return 0;
  if (num_dealt_ == 0) return kNumPlayers * spec_->hole_cards;
  return spec_->board_cards[round_];
}

bool GameState::CardUsed(int card) const {
  return std::find(cards_.begin(), cards_.begin() + num_dealt_, card) !=
         cards_.begin() + num_dealt_;
}

void GameState::DealCards(std::span<const int> cards) {
  if (phase_ != Phase::kChance) {
    throw std::logic_error("DealCards called at a non-chance node");
  }
  if (static_cast<int>(cards.size()) != CardsNeeded()) {
    throw std::invalid_argument("wrong number of cards dealt");
  }
  for (std::size_t i = 0; i < cards.size(); ++i) {
    const int c = cards[i];
    if (c < 0 || c >= spec_->DeckSize() || CardUsed(c) ||
        std::find(cards.begin(), cards.begin() + i, c) != cards.begin() + i) {
      throw std::invalid_argument("card " + std::to_string(c) +
                                  " is invalid or already dealt");
    }
  }
  std::copy(cards.begin(), cards.end(), cards_.begin() + num_dealt_);
  num_dealt_ += static_cast<int>(cards.size());
  StartBettingRound();
}

void GameState::SampleChance(Rng& rng) {
  std::vector<int> pool;
  pool.reserve(spec_->DeckSize());
  for (int c = 0; c < spec_->DeckSize(); ++c) {
    if (!CardUsed(c)) pool.push_back(c);
  }
  const int k = CardsNeeded();
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  DealCards(std::span<const int>(pool.data(), k));
}

std::vector<std::pair<GameState, double>> GameState::ChanceOutcomes() const {
  if (phase_ != Phase::kChance) {
    throw std::logic_error("ChanceOutcomes called at a non-chance node");
  }
  std::vector<int> pool;
  for (int c = 0; c < spec_->DeckSize(); ++c) {
    if (!CardUsed(c)) pool.push_back(c);
  }
  std::vector<std::pair<GameState, double>> out;
  const int n = static_cast<int>(pool.size());
  if (num_dealt_ == 0) {
    const int h = spec_->hole_cards;
    const double count = Binomial(n, h) * Binomial(n - h, h);
    if (count > kMaxChanceOutcomes) {
      throw std::length_error("too many deals to enumerate in " + spec_->name);
    }
    const double p = 1.0 / count;
    ForEachCombination(pool, h, [&](const std::vector<int>& first) {
      std::vector<int> rest;
      for (int c : pool) {
        if (std::find(first.begin(), first.end(), c) == first.end()) {
          rest.push_back(c);
        }
      }
      ForEachCombination(rest, h, [&](const std::vector<int>& second) {
        std::vector<int> deal = first;
        deal.insert(deal.end(), second.begin(), second.end());
        GameState next = *this;
        next.DealCards(deal);
        out.emplace_back(std::move(next), p);
      });
    });
  } else {
    const int k = CardsNeeded();
    const double count = Binomial(n, k);
    if (count > kMaxChanceOutcomes) {
      throw std::length_error("too many board cards to enumerate");
    }
    const double p = 1.0 / count;
    ForEachCombination(pool, k, [&](const std::vector<int>& board) {
      GameState next = *this;
      next.DealCards(board);
      out.emplace_back(std::move(next), p);
    });
  }
  return out;
}

std::array<int, kNumPlayers> GameState::Payoffs() const {
  if (phase_ != Phase::kTerminal) {
    throw std::logic_error("payoffs requested at a non-terminal state");
  }
  if (folder_ >= 0) {
    std::array<int, kNumPlayers> pay{};
    pay[folder_] = -contrib_[folder_];
    pay[1 - folder_] = contrib_[folder_];
    return pay;
  }
  const auto s0 = ShowdownStrength(*spec_, HoleCards(0), BoardCards());
  const auto s1 = ShowdownStrength(*spec_, HoleCards(1), BoardCards());
  if (s0 > s1) return {contrib_[1], -contrib_[1]};
  if (s1 > s0) return {-contrib_[0], contrib_[0]};
  return {0, 0};
}

std::span<const int> GameState::HoleCards(int player) const {
  if (num_dealt_ == 0) return {};
  const int h = spec_->hole_cards;
  return std::span<const int>(cards_.data() + player * h, h);
}

std::span<const int> GameState::BoardCards() const {
  const int start = kNumPlayers * spec_->hole_cards;
  if (num_dealt_ <= start) return {};
  return std::span<const int>(cards_.data() + start, num_dealt_ - start);
}

std::string GameState::InfoStateKey(int player) const {
  std::string key = SortedCardString(*spec_, HoleCards(player));
  auto board = BoardCards();
  std::size_t offset = 0;
  for (int r = 1; r < spec_->num_rounds && offset < board.size(); ++r) {
    const std::size_t n = spec_->board_cards[r];
    key += SortedCardString(*spec_, board.subspan(offset, n));
    offset += n;
  }
  int r = 0;
  for (const BetRecord& b : history_) {
    for (; r < b.round; ++r) key += '/';
    key += ActionChar(b.action);
  }
  for (; r < round_; ++r) key += '/';
  return key;
}

EncodingBits GameState::EncodeBits(int player) const {
  EncodingBits bits{};
  const int block = spec_->CardBlockSize();
  auto card_index = [&](int c) {
    return spec_->rank_only_cards ? CardRank(*spec_, c) : c;
  };
  for (int c : HoleCards(player)) SetBit(bits, card_index(c));
  auto board = BoardCards();
  std::size_t offset = 0;
  for (int r = 1; r < spec_->num_rounds && offset < board.size(); ++r) {
    for (int i = 0; i < spec_->board_cards[r]; ++i) {
      SetBit(bits, r * block + card_index(board[offset + i]));
    }
    offset += spec_->board_cards[r];
  }
  const int base = spec_->CardSectionSize();
  for (const BetRecord& b : history_) {
    if (b.action == Action::kFold) continue;
    SetBit(bits, base + spec_->BettingCell(b.player, b.round, b.raises_before,
                                           b.action));
  }
  return bits;
}

std::vector<float> GameState::Encode(int player) const {
  std::vector<float> out(spec_->EncodingSize());
  UnpackEncoding(EncodeBits(player), out);
  return out;
}

InfoState GameState::Information(int player) const {
  InfoState info;
  info.player = player;
  info.key = InfoStateKey(player);
  info.encoding = Encode(player);
  if (IsDecision() && to_act_ == player) info.legal = LegalMask();
  return info;
}

std::string GameState::ToString() const {
  std::ostringstream os;
  os << spec_->name << "[";
  for (int p = 0; p < kNumPlayers; ++p) {
    if (p) os << ' ';
    os << "p" << p << ":" << SortedCardString(*spec_, HoleCards(p));
  }
  os << " board:" << SortedCardString(*spec_, BoardCards()) << " bets:";
  int r = 0;
  for (const BetRecord& b : history_) {
    for (; r < b.round; ++r) os << '/';
    os << ActionChar(b.action);
  }
  os << " pot:" << contrib_[0] << "+" << contrib_[1] << "]";
  return os.str();
}

InfoKeyParts ParseInfoKey(const GameSpec& spec, std::string_view key) {
  auto fail = [&](const std::string& why) {
    return std::invalid_argument("malformed " + spec.name + " info-state key '" +
                                 std::string(key) + "': " + why);
  };
  const int rounds = 1 + static_cast<int>(std::count(key.begin(), key.end(), '/'));
  if (rounds > spec.num_rounds) throw fail("too many rounds");
  const int width = spec.rank_only_cards ? 1 : 2;
  std::size_t pos = 0;
  auto read_card = [&]() {
    if (pos + width > key.size()) throw fail("truncated card section");
    const auto rank = spec.rank_chars.find(key[pos]);
    if (rank == std::string::npos) throw fail("bad rank character");
    int card = static_cast<int>(rank);
    if (!spec.rank_only_cards) {
      const auto suit = spec.suit_chars.find(key[pos + 1]);
      if (suit == std::string::npos) throw fail("bad suit character");
      card = card * spec.num_suits + static_cast<int>(suit);
    }
    pos += width;
    return card;
  };
  InfoKeyParts parts;
  for (int i = 0; i < spec.hole_cards; ++i) parts.hole.push_back(read_card());
  for (int r = 1; r < rounds; ++r) {
    for (int i = 0; i < spec.board_cards[r]; ++i) {
      parts.board.push_back(read_card());
    }
  }
  parts.betting.emplace_back();
  for (; pos < key.size(); ++pos) {
    const char ch = key[pos];
    if (ch == '/') {
      parts.betting.emplace_back();
    } else if (ch == 'c' || ch == 'r') {
      parts.betting.back() += ch;
    } else {
      throw fail("bad betting character");
    }
  }
  if (static_cast<int>(parts.betting.size()) != rounds) {
    throw fail("round separators inside the card section");
  }
  return parts;
}

namespace {

// Replays betting strings; calls fn(player, round, raises_before, action).
// Returns the player to act next.
template <class Fn>
int ReplayBetting(const GameSpec& spec, const InfoKeyParts& parts, Fn&& fn) {
  int player = spec.first_player[0];
  for (std::size_t r = 0; r < parts.betting.size(); ++r) {
    player = spec.first_player[r];
    int raises = 0;
    for (char ch : parts.betting[r]) {
      const Action a = ch == 'r' ? Action::kRaise : Action::kCall;
      fn(player, static_cast<int>(r), raises, a);
      if (a == Action::kRaise) ++raises;
      player = 1 - player;
    }
  }
  return player;
}

}  // namespace

std::vector<float> EncodeInfoKey(const GameSpec& spec, std::string_view key) {
  const InfoKeyParts parts = ParseInfoKey(spec, key);
  std::vector<float> out(spec.EncodingSize(), 0.0f);
  const int block = spec.CardBlockSize();
  for (int c : parts.hole) out[c] = 1.0f;
  std::size_t offset = 0;
  for (std::size_t r = 1; r < parts.betting.size(); ++r) {
    for (int i = 0; i < spec.board_cards[r]; ++i) {
      out[r * block + parts.board[offset + i]] = 1.0f;
    }
    offset += spec.board_cards[r];
  }
  const int base = spec.CardSectionSize();
  ReplayBetting(spec, parts, [&](int player, int round, int raises, Action a) {
    out[base + spec.BettingCell(player, round, raises, a)] = 1.0f;
  });
  return out;
}

int PlayerFromInfoKey(const GameSpec& spec, std::string_view key) {
  const InfoKeyParts parts = ParseInfoKey(spec, key);
  return ReplayBetting(spec, parts, [](int, int, int, Action) {});
}

}  // namespace nfsp::game
