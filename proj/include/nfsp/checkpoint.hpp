#pragma once

// Agent checkpoint directory:
//   agent.json  config, seat and step counters
//   q.bin       Q network (see WriteMlp for the byte layout)
//   pi.bin      average-policy network
// Replay memories are not saved; a resumed agent starts with empty memories.

#include <filesystem>

#include "nfsp/agent.hpp"

namespace nfsp::harness {

void SaveAgent(const std::filesystem::path& dir, const agents::NfspAgent& agent);

struct AgentSnapshot {
  int player = 0;
  agents::AgentConfig config;
  agents::AgentCounters counters;
  neural::Mlp q_net;
  neural::Mlp pi_net;
};

// Throws std::runtime_error on a missing or malformed checkpoint.
AgentSnapshot LoadAgentSnapshot(const std::filesystem::path& dir);

// Rebuilds an agent (fresh memories, RNG streams from `seed`).
agents::NfspAgent RestoreAgent(const AgentSnapshot& snapshot,
                               const game::GameSpec& spec, std::uint64_t seed);

}  // namespace nfsp::harness
