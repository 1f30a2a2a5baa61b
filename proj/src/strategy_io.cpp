#include "nfsp/strategy_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace nfsp::exact {

void WriteStrategyJson(std::ostream& os, const StrategyProfile& profile) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  // std::map iteration gives a stable key order per player.
  for (const auto& strategy : profile) {
    for (const auto& [key, probs] : strategy) j[key] = probs;
  }
  os << j.dump(1) << '\n';
}

void SaveStrategy(const std::filesystem::path& path, const StrategyProfile& profile) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  WriteStrategyJson(os, profile);
}

StrategyProfile ReadStrategyJson(std::istream& is, const game::GameSpec& spec) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed strategy JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("strategy JSON must be an object");
  StrategyProfile profile;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_array()) {
      throw std::runtime_error("strategy entry '" + key + "' is not an array");
    }
    std::vector<double> probs;
    for (const auto& v : value) {
      if (!v.is_number()) {
        throw std::runtime_error("strategy entry '" + key + "' has a non-number");
      }
      probs.push_back(v.get<double>());
    }
    int player = 0;
    try {
      player = game::PlayerFromInfoKey(spec, key);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(e.what());
    }
    profile[player].emplace(key, std::move(probs));
  }
  return profile;
}

StrategyProfile LoadStrategy(const std::filesystem::path& path,
                             const game::GameSpec& spec) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return ReadStrategyJson(is, spec);
}

}  // namespace nfsp::exact
