#include "nfsp/config.hpp"

#include <fstream>
#include <set>

namespace nfsp::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void RejectUnknown(const json& j, const std::set<std::string>& known,
                   const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void Read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string DecayName(agents::DecayUnit unit) {
  return unit == agents::DecayUnit::kEpisodes ? "episodes" : "updates";
}

}  // namespace

std::string EvalTargetName(EvalTarget target) {
  switch (target) {
    case EvalTarget::kAverage:
      return "average";
    case EvalTarget::kGreedyAverage:
      return "greedy_average";
    case EvalTarget::kGreedyQ:
      return "greedy_q";
  }
  return "?";
}

EvalTarget ParseEvalTarget(const std::string& name) {
  if (name == "average") return EvalTarget::kAverage;
  if (name == "greedy_average") return EvalTarget::kGreedyAverage;
  if (name == "greedy_q") return EvalTarget::kGreedyQ;
  throw ConfigError("eval_target must be average, greedy_average or greedy_q");
}

ordered_json ToJson(const agents::AgentConfig& c) {
  ordered_json j;
  j["hidden_layers"] = c.hidden_layers;
  j["eta"] = c.eta;
  j["epsilon_start"] = c.epsilon_start;
  j["epsilon_horizon"] = c.epsilon_horizon;
  j["epsilon_decay_unit"] = DecayName(c.decay_unit);
  j["rl_capacity"] = c.rl_capacity;
  j["sl_capacity"] = c.sl_capacity;
  j["rl_memory"] = memory::MemoryKindName(c.rl_kind);
  j["sl_memory"] = memory::MemoryKindName(c.sl_kind);
  j["sl_min_probability"] = c.sl_min_probability;
  j["rl_learning_rate"] = c.rl_learning_rate;
  j["sl_learning_rate"] = c.sl_learning_rate;
  j["batch_size"] = c.batch_size;
  j["steps_per_update"] = c.steps_per_update;
  j["updates_per_round"] = c.updates_per_round;
  j["target_refit_every"] = c.target_refit_every;
  j["reward_scale"] = c.reward_scale;
  j["train_average_policy"] = c.train_average_policy;
  return j;
}

agents::AgentConfig AgentConfigFromJson(const json& j, const agents::AgentConfig& base) {
  RejectUnknown(j,
                {"hidden_layers", "eta", "epsilon_start", "epsilon_horizon",
                 "epsilon_decay_unit", "rl_capacity", "sl_capacity", "rl_memory",
                 "sl_memory", "sl_min_probability", "rl_learning_rate",
                 "sl_learning_rate", "batch_size", "steps_per_update",
                 "updates_per_round", "target_refit_every", "reward_scale",
                 "train_average_policy"},
                "agent config");
  agents::AgentConfig c = base;
  Read(j, "hidden_layers", c.hidden_layers);
  Read(j, "eta", c.eta);
  Read(j, "epsilon_start", c.epsilon_start);
  Read(j, "epsilon_horizon", c.epsilon_horizon);
  std::string text;
  if (j.contains("epsilon_decay_unit")) {
    Read(j, "epsilon_decay_unit", text);
    if (text == "episodes") {
      c.decay_unit = agents::DecayUnit::kEpisodes;
    } else if (text == "updates") {
      c.decay_unit = agents::DecayUnit::kUpdates;
    } else {
      throw ConfigError("epsilon_decay_unit must be episodes or updates");
    }
  }
  Read(j, "rl_capacity", c.rl_capacity);
  Read(j, "sl_capacity", c.sl_capacity);
  try {
    if (j.contains("rl_memory")) {
      Read(j, "rl_memory", text);
      c.rl_kind = memory::ParseMemoryKind(text);
    }
    if (j.contains("sl_memory")) {
      Read(j, "sl_memory", text);
      c.sl_kind = memory::ParseMemoryKind(text);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Read(j, "sl_min_probability", c.sl_min_probability);
  Read(j, "rl_learning_rate", c.rl_learning_rate);
  Read(j, "sl_learning_rate", c.sl_learning_rate);
  Read(j, "batch_size", c.batch_size);
  Read(j, "steps_per_update", c.steps_per_update);
  Read(j, "updates_per_round", c.updates_per_round);
  Read(j, "target_refit_every", c.target_refit_every);
  Read(j, "reward_scale", c.reward_scale);
  Read(j, "train_average_policy", c.train_average_policy);
  try {
    c.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

void ExperimentConfig::Validate() const {
  try {
    game::GameSpecByName(game);
    for (const auto& a : agents) a.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (episodes == 0) throw ConfigError("episodes must be positive");
  if (eval_every == 0) throw ConfigError("eval_every must be positive");
  if (eval_hands == 0 || eval_hands % 2 != 0) {
    throw ConfigError("eval_hands must be a positive even number");
  }
}

ordered_json ToJson(const ExperimentConfig& c) {
  ordered_json j;
  j["game"] = c.game;
  j["episodes"] = c.episodes;
  j["eval_every"] = c.eval_every;
  j["checkpoint_every"] = c.checkpoint_every;
  j["seed"] = c.seed;
  j["eval_target"] = EvalTargetName(c.eval_target);
  j["eval_baseline"] = c.eval_baseline;
  j["eval_hands"] = c.eval_hands;
  j["metrics_path"] = c.metrics_path;
  j["checkpoint_dir"] = c.checkpoint_dir;
  j["record_timing"] = c.record_timing;
  j["agents"] = ordered_json::array({ToJson(c.agents[0]), ToJson(c.agents[1])});
  return j;
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  RejectUnknown(j,
                {"game", "episodes", "eval_every", "checkpoint_every", "seed",
                 "eval_target", "eval_baseline", "eval_hands", "metrics_path",
                 "checkpoint_dir", "record_timing", "agent", "agents"},
                "experiment config");
  ExperimentConfig c;
  Read(j, "game", c.game);
  Read(j, "episodes", c.episodes);
  Read(j, "eval_every", c.eval_every);
  Read(j, "checkpoint_every", c.checkpoint_every);
  Read(j, "seed", c.seed);
  if (j.contains("eval_target")) {
    std::string text;
    Read(j, "eval_target", text);
    c.eval_target = ParseEvalTarget(text);
  }
  Read(j, "eval_baseline", c.eval_baseline);
  Read(j, "eval_hands", c.eval_hands);
  Read(j, "metrics_path", c.metrics_path);
  Read(j, "checkpoint_dir", c.checkpoint_dir);
  Read(j, "record_timing", c.record_timing);
  // "agent" applies to both seats; "agents" holds per-seat overrides.
  agents::AgentConfig shared;
  if (j.contains("agent")) shared = AgentConfigFromJson(j.at("agent"));
  c.agents = {shared, shared};
  if (j.contains("agents")) {
    const json& list = j.at("agents");
    if (!list.is_array() || list.size() != 2) {
      throw ConfigError("'agents' must be an array of two agent configs");
    }
    for (int p = 0; p < 2; ++p) c.agents[p] = AgentConfigFromJson(list[p], shared);
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

void SaveConfig(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << ToJson(config).dump(2) << '\n';
}

}  // namespace nfsp::harness
