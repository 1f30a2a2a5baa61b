#pragma once

// Experiment configuration, stored as JSON. See README for the schema.

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nfsp/agent.hpp"

namespace nfsp::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which strategy the periodic evaluation measures.
enum class EvalTarget { kAverage, kGreedyAverage, kGreedyQ };

struct ExperimentConfig {
  std::string game = "leduc";
  std::array<agents::AgentConfig, 2> agents;
  std::uint64_t episodes = 2000000;
  std::uint64_t eval_every = 20000;
  std::uint64_t checkpoint_every = 0;  // 0: final checkpoint only
  std::uint64_t seed = 0;
  EvalTarget eval_target = EvalTarget::kAverage;
  // Games without exact evaluation report mbb/h against this baseline.
  std::string eval_baseline = "uniform";
  std::uint64_t eval_hands = 2000;
  std::string metrics_path = "metrics.csv";
  std::string checkpoint_dir = "checkpoints";
  bool record_timing = false;

  void Validate() const;
};

nlohmann::ordered_json ToJson(const agents::AgentConfig& config);
agents::AgentConfig AgentConfigFromJson(const nlohmann::json& j,
                                        const agents::AgentConfig& base = {});

nlohmann::ordered_json ToJson(const ExperimentConfig& config);
// Unknown keys and ill-typed values throw ConfigError.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);

ExperimentConfig LoadConfig(const std::filesystem::path& path);
void SaveConfig(const std::filesystem::path& path, const ExperimentConfig& config);

std::string EvalTargetName(EvalTarget target);
EvalTarget ParseEvalTarget(const std::string& name);

}  // namespace nfsp::harness
