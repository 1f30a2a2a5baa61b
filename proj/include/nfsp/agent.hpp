#pragma once

// The NFSP agent: an epsilon-greedy Q learner (best response) and a
// supervised average-policy network, mixed per episode with probability eta.
// eta = 1 with a circular M_RL gives the DQN baseline, whose Pi network only
// tracks passively.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nfsp/exact.hpp"
#include "nfsp/game.hpp"
#include "nfsp/memory.hpp"
#include "nfsp/mlp.hpp"

namespace nfsp::agents {

enum class PolicyMode { kBestResponse, kAveragePolicy };

// What the exploration counter k in eps0 / sqrt(1 + k / h) counts.
enum class DecayUnit { kEpisodes, kUpdates };

struct AgentConfig {
  std::vector<int> hidden_layers = {64};
  double eta = 0.1;
  double epsilon_start = 0.06;
  double epsilon_horizon = 10000;
  DecayUnit decay_unit = DecayUnit::kEpisodes;
  std::size_t rl_capacity = 200000;
  std::size_t sl_capacity = 2000000;
  memory::MemoryKind rl_kind = memory::MemoryKind::kCircular;
  memory::MemoryKind sl_kind = memory::MemoryKind::kReservoir;
  double sl_min_probability = 0.25;  // exponential reservoir only
  double rl_learning_rate = 0.1;
  double sl_learning_rate = 0.005;
  int batch_size = 128;
  int steps_per_update = 128;  // own steps between update rounds
  int updates_per_round = 2;   // per network
  int target_refit_every = 300;
  double reward_scale = 1.0;
  bool train_average_policy = true;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

struct TrainStats {
  std::optional<double> q_loss;   // mean over this round's updates
  std::optional<double> pi_loss;
  int q_updates = 0;
  int pi_updates = 0;
};

struct AgentCounters {
  std::uint64_t episodes = 0;
  std::uint64_t steps = 0;
  std::uint64_t q_updates = 0;
  std::uint64_t pi_updates = 0;
  std::uint64_t best_response_episodes = 0;
};

class NfspAgent {
 public:
  NfspAgent(const game::GameSpec& spec, int player, AgentConfig config,
            std::uint64_t seed);

  PolicyMode BeginEpisode();
  PolicyMode mode() const { return mode_; }

  game::Action Act(const game::EncodingBits& state, game::ActionMask legal);
  game::Action Act(const game::InfoState& info);

  // M_RL always; (s, a) into M_SL only in best-response mode.
  void Observe(const memory::Transition& transition);

  // Call once per own environment step.
  TrainStats TrainStep();

  double Epsilon() const;

  // Masked softmax of Pi and raw Q values for one state.
  std::vector<double> AveragePolicy(const game::EncodingBits& state,
                                    game::ActionMask legal) const;
  std::vector<float> QValues(const game::EncodingBits& state) const;

  const game::GameSpec& spec() const { return *spec_; }
  int player() const { return player_; }
  const AgentConfig& config() const { return config_; }
  const AgentCounters& counters() const { return counters_; }
  AgentCounters& mutable_counters() { return counters_; }
  const neural::Mlp& q_network() const { return q_net_; }
  const neural::Mlp& policy_network() const { return pi_net_; }
  const neural::TargetNetwork& target_network() const { return target_; }
  const memory::ReplayMemory<memory::Transition>& rl_memory() const { return rl_memory_; }
  const memory::ReplayMemory<memory::BehaviourTuple>& sl_memory() const {
    return sl_memory_;
  }

  // Used when restoring from a checkpoint.
  void SetNetworks(neural::Mlp q_net, neural::Mlp pi_net);

 private:
  void UpdateQ(TrainStats& stats);
  void UpdatePolicy(TrainStats& stats);

  const game::GameSpec* spec_;
  int player_;
  AgentConfig config_;
  neural::Mlp q_net_;
  neural::Mlp pi_net_;
  neural::TargetNetwork target_;
  memory::ReplayMemory<memory::Transition> rl_memory_;
  memory::ReplayMemory<memory::BehaviourTuple> sl_memory_;
  PolicyMode mode_ = PolicyMode::kAveragePolicy;
  AgentCounters counters_;
  // Separate streams so that, e.g., disabling Pi training leaves the action
  // trace untouched.
  game::Rng mode_rng_;
  game::Rng act_rng_;
  game::Rng q_batch_rng_;
  game::Rng pi_batch_rng_;
};

std::vector<int> LayerSizes(const game::GameSpec& spec, const std::vector<int>& hidden);

// Tabular extraction over every information state of the agent's seat.
// Throws std::length_error for games too large to enumerate.
exact::BehaviouralStrategy ExtractAverageStrategy(const NfspAgent& agent);
exact::BehaviouralStrategy ExtractGreedyAverage(const NfspAgent& agent);
exact::BehaviouralStrategy ExtractBestResponse(const NfspAgent& agent);

// Same extraction straight from networks, for frozen copies.
enum class Extraction { kAverage, kGreedyAverage, kGreedyQ };
exact::BehaviouralStrategy ExtractStrategy(const game::GameSpec& spec, int player,
                                           const neural::Mlp& net, Extraction how);

}  // namespace nfsp::agents
