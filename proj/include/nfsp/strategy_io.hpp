#pragma once

// Strategy files: one JSON object mapping info-state key to the action
// probabilities over the legal actions, ordered (Fold, Call, Raise). Keys of
// both players share the object; the player is recovered from the key.

#include <filesystem>
#include <iosfwd>

#include "nfsp/exact.hpp"

namespace nfsp::exact {

void WriteStrategyJson(std::ostream& os, const StrategyProfile& profile);
void SaveStrategy(const std::filesystem::path& path, const StrategyProfile& profile);

// Throws std::runtime_error on malformed input.
StrategyProfile ReadStrategyJson(std::istream& is, const game::GameSpec& spec);
StrategyProfile LoadStrategy(const std::filesystem::path& path,
                             const game::GameSpec& spec);

}  // namespace nfsp::exact
