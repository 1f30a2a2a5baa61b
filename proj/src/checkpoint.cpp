#include "nfsp/checkpoint.hpp"

#include <fstream>

#include "nfsp/config.hpp"

namespace nfsp::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void SaveAgent(const fs::path& dir, const agents::NfspAgent& agent) {
  fs::create_directories(dir);
  const auto& c = agent.counters();
  ordered_json j;
  j["player"] = agent.player();
  j["game"] = agent.spec().name;
  j["counters"] = {{"episodes", c.episodes},
                   {"steps", c.steps},
                   {"q_updates", c.q_updates},
                   {"pi_updates", c.pi_updates},
                   {"best_response_episodes", c.best_response_episodes}};
  j["config"] = ToJson(agent.config());
  std::ofstream meta(dir / "agent.json");
  meta << j.dump(2) << '\n';
  std::ofstream q(dir / "q.bin", std::ios::binary);
  neural::WriteMlp(q, agent.q_network());
  std::ofstream pi(dir / "pi.bin", std::ios::binary);
  neural::WriteMlp(pi, agent.policy_network());
  if (!meta || !q || !pi) throw std::runtime_error("failed writing checkpoint " + dir.string());
}

AgentSnapshot LoadAgentSnapshot(const fs::path& dir) {
  std::ifstream meta(dir / "agent.json");
  if (!meta) throw std::runtime_error("no agent checkpoint in " + dir.string());
  AgentSnapshot s;
  try {
    json j;
    meta >> j;
    s.player = j.at("player").get<int>();
    const json& c = j.at("counters");
    s.counters.episodes = c.at("episodes").get<std::uint64_t>();
    s.counters.steps = c.at("steps").get<std::uint64_t>();
    s.counters.q_updates = c.at("q_updates").get<std::uint64_t>();
    s.counters.pi_updates = c.at("pi_updates").get<std::uint64_t>();
    s.counters.best_response_episodes = c.at("best_response_episodes").get<std::uint64_t>();
    s.config = AgentConfigFromJson(j.at("config"));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed agent checkpoint " + dir.string() + ": " + e.what());
  }
  std::ifstream q(dir / "q.bin", std::ios::binary);
  std::ifstream pi(dir / "pi.bin", std::ios::binary);
  if (!q || !pi) throw std::runtime_error("missing network files in " + dir.string());
  s.q_net = neural::ReadMlp(q);
  s.pi_net = neural::ReadMlp(pi);
  return s;
}

agents::NfspAgent RestoreAgent(const AgentSnapshot& snapshot, const game::GameSpec& spec,
                               std::uint64_t seed) {
  agents::NfspAgent agent(spec, snapshot.player, snapshot.config, seed);
  agent.SetNetworks(snapshot.q_net, snapshot.pi_net);
  agent.mutable_counters() = snapshot.counters;
  return agent;
}

}  // namespace nfsp::harness
