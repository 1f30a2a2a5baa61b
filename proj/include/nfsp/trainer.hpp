#pragma once

// Self-play driver: two independent NFSP agents, one hand per episode,
// periodic evaluation of the extracted strategies.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nfsp/agent.hpp"
#include "nfsp/config.hpp"

namespace nfsp::harness {

struct MetricsRow {
  std::uint64_t episode = 0;
  double metric = 0.0;  // exploitability, or mbb/h against the baseline
  std::optional<double> q_loss;
  std::optional<double> pi_loss;
  double wall_clock_s = 0.0;
};

void WriteCsvHeader(std::ostream& os);
void WriteCsvRow(std::ostream& os, const MetricsRow& row);

class Trainer {
 public:
  explicit Trainer(ExperimentConfig config);

  // Restores networks and counters from a directory written by
  // SaveCheckpoint. Memories restart empty.
  static Trainer Resume(const std::filesystem::path& dir);

  void RunEpisode();
  void RunEpisodes(std::uint64_t n);

  // Trains up to config().episodes, calling `on_row` after every evaluation.
  // On a non-finite loss a diagnostic row with NaN metric is emitted and
  // neural::NumericalError is rethrown.
  void Run(const std::function<void(const MetricsRow&)>& on_row);

  // Pure: never touches training state or random streams.
  double Evaluate() const;
  double Evaluate(EvalTarget target) const;
  exact::StrategyProfile Profile(EvalTarget target) const;

  // Metric now plus loss averages since the previous row.
  MetricsRow Row();

  void SaveCheckpoint(const std::filesystem::path& dir) const;

  // Resumed runs may extend the budget; outputs are the caller's concern.
  void set_episode_budget(std::uint64_t episodes);

  std::uint64_t episode() const { return episode_; }
  const ExperimentConfig& config() const { return config_; }
  const game::GameSpec& spec() const { return *spec_; }
  agents::NfspAgent& agent(int p) { return agents_[p]; }
  const agents::NfspAgent& agent(int p) const { return agents_[p]; }

 private:
  Trainer(ExperimentConfig config, std::uint64_t start_episode);

  ExperimentConfig config_;
  const game::GameSpec* spec_;
  std::uint64_t episode_;
  std::vector<agents::NfspAgent> agents_;
  game::Rng deal_rng_;
  double q_loss_sum_ = 0;
  double pi_loss_sum_ = 0;
  std::uint64_t q_loss_count_ = 0;
  std::uint64_t pi_loss_count_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace nfsp::harness
