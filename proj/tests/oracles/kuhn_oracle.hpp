#pragma once

// Kuhn poker written out by hand: cards J < Q < K, ante 1, one bet of 1.
// Betting lines: cc, crc, crf, rc, rf. Player 0 acts first.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle::kuhn {

inline const char kCard[3] = {'J', 'Q', 'K'};

inline const std::vector<std::string>& TerminalLines() {
  static const std::vector<std::string> lines = {"cc", "crc", "crf", "rc", "rf"};
  return lines;
}

// Chips won by player 0.
inline int Payoff0(int c0, int c1, const std::string& line) {
  const int showdown = c0 > c1 ? 1 : -1;
  if (line == "cc") return showdown;
  if (line == "crc" || line == "rc") return 2 * showdown;
  if (line == "crf") return -1;  // player 0 folds to the bet
  if (line == "rf") return 1;
  throw std::logic_error("not a terminal line: " + line);
}

// Decision points: (player, betting prefix).
struct Point {
  int player;
  std::string prefix;
};

inline const std::vector<Point>& DecisionPoints() {
  static const std::vector<Point> points = {{0, ""}, {1, "c"}, {1, "r"}, {0, "cr"}};
  return points;
}

inline std::string Key(int card, const std::string& prefix) {
  return std::string(1, kCard[card]) + prefix;
}

// Legal actions at a prefix, in (f, c, r) order.
inline std::string Legal(const std::string& prefix) {
  return (prefix == "r" || prefix == "cr") ? "fc" : "cr";
}

// Probability that the acting player picks `action` at `key`.
using Policy = std::function<double(const std::string& key, char action)>;

// Probability of every (c0, c1, line), chance included.
inline std::map<std::string, double> TerminalDistribution(const Policy& p0,
                                                          const Policy& p1) {
  std::map<std::string, double> out;
  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 == c1) continue;
      for (const auto& line : TerminalLines()) {
        double prob = 1.0 / 6.0;
        for (std::size_t i = 0; i < line.size(); ++i) {
          const int player = static_cast<int>(i % 2);
          const std::string prefix = line.substr(0, i);
          prob *= player == 0 ? p0(Key(c0, prefix), line[i]) : p1(Key(c1, prefix), line[i]);
        }
        out[std::string(1, kCard[c0]) + kCard[c1] + ":" + line] = prob;
      }
    }
  }
  return out;
}

inline double Value0(const Policy& p0, const Policy& p1) {
  double v = 0;
  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 == c1) continue;
      for (const auto& line : TerminalLines()) {
        double prob = 1.0 / 6.0;
        for (std::size_t i = 0; i < line.size(); ++i) {
          const std::string prefix = line.substr(0, i);
          prob *= i % 2 == 0 ? p0(Key(c0, prefix), line[i]) : p1(Key(c1, prefix), line[i]);
        }
        v += prob * Payoff0(c0, c1, line);
      }
    }
  }
  return v;
}

// The six information states of a player.
inline std::vector<std::string> InfoKeys(int player) {
  std::vector<std::string> keys;
  for (const auto& pt : DecisionPoints()) {
    if (pt.player != player) continue;
    for (int c = 0; c < 3; ++c) keys.push_back(Key(c, pt.prefix));
  }
  return keys;
}

inline std::string PrefixOf(const std::string& key) { return key.substr(1); }

// All 64 pure strategies of a player: key -> chosen action.
inline std::vector<std::map<std::string, char>> PureStrategies(int player) {
  const auto keys = InfoKeys(player);
  std::vector<std::map<std::string, char>> out;
  for (int mask = 0; mask < (1 << keys.size()); ++mask) {
    std::map<std::string, char> s;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::string legal = Legal(PrefixOf(keys[i]));
      s[keys[i]] = legal[(mask >> i) & 1];
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline Policy FromPure(const std::map<std::string, char>& pure) {
  return [pure](const std::string& key, char a) { return pure.at(key) == a ? 1.0 : 0.0; };
}

// Best-response value of `player` by trying every pure strategy.
inline double BruteForceBestResponse(int player, const Policy& opponent) {
  double best = -1e300;
  for (const auto& pure : PureStrategies(player)) {
    const double v = player == 0 ? Value0(FromPure(pure), opponent)
                                 : -Value0(opponent, FromPure(pure));
    best = std::max(best, v);
  }
  return best;
}

// 64 x 64 payoff matrix for player 0.
inline std::vector<std::vector<double>> PayoffMatrix() {
  const auto rows = PureStrategies(0);
  const auto cols = PureStrategies(1);
  std::vector<std::vector<double>> m(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m[i][j] = Value0(FromPure(rows[i]), FromPure(cols[j]));
    }
  }
  return m;
}

}  // namespace oracle::kuhn
