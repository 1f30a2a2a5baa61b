#include "nfsp/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "nfsp/checkpoint.hpp"
#include "nfsp/match.hpp"

namespace nfsp::harness {

namespace fs = std::filesystem;
using game::EncodingBits;

namespace {

std::string Number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t AgentSeed(std::uint64_t seed, std::uint64_t start_episode) {
  std::seed_seq seq{seed, start_episode, std::uint64_t{1}};
  return game::Rng(seq)();
}

game::Rng DealRng(std::uint64_t seed, std::uint64_t start_episode) {
  std::seed_seq seq{seed, start_episode, std::uint64_t{2}};
  return game::Rng(seq);
}

agents::Extraction ToExtraction(EvalTarget target) {
  switch (target) {
    case EvalTarget::kAverage:
      return agents::Extraction::kAverage;
    case EvalTarget::kGreedyAverage:
      return agents::Extraction::kGreedyAverage;
    case EvalTarget::kGreedyQ:
      return agents::Extraction::kGreedyQ;
  }
  return agents::Extraction::kAverage;
}

}  // namespace

void WriteCsvHeader(std::ostream& os) {
  os << "episode,exploitability_or_mbbh,q_loss,pi_loss,wall_clock_s\n";
}

void WriteCsvRow(std::ostream& os, const MetricsRow& row) {
  os << row.episode << ',' << Number(row.metric) << ','
     << (row.q_loss ? Number(*row.q_loss) : "") << ','
     << (row.pi_loss ? Number(*row.pi_loss) : "") << ',' << Number(row.wall_clock_s)
     << '\n';
}

Trainer::Trainer(ExperimentConfig config) : Trainer(std::move(config), 0) {}

Trainer::Trainer(ExperimentConfig config, std::uint64_t start_episode)
    : config_((config.Validate(), std::move(config))),
      spec_(&game::GameSpecByName(config_.game)),
      episode_(start_episode),
      deal_rng_(DealRng(config_.seed, start_episode)),
      start_(std::chrono::steady_clock::now()) {
  const std::uint64_t seed = AgentSeed(config_.seed, start_episode);
  for (int p = 0; p < game::kNumPlayers; ++p) {
    agents_.emplace_back(*spec_, p, config_.agents[p], seed);
  }
}

void Trainer::RunEpisode() {
  struct Pending {
    bool active = false;
    EncodingBits state{};
    std::uint8_t action = 0;
    game::ActionMask legal;
  };
  std::array<Pending, game::kNumPlayers> pending;
  for (auto& a : agents_) a.BeginEpisode();

  game::GameState state(*spec_);
  while (!state.IsTerminal()) {
    if (state.IsChance()) {
      state.SampleChance(deal_rng_);
      continue;
    }
    const int p = state.CurrentPlayer();
    auto& agent = agents_[p];
    const EncodingBits bits = state.EncodeBits(p);
    const game::ActionMask legal = state.LegalMask();
    if (pending[p].active) {
      memory::Transition t;
      t.state = pending[p].state;
      t.action = pending[p].action;
      t.legal = pending[p].legal;
      t.next_state = bits;
      t.next_legal = legal;
      agent.Observe(t);
    }
    const game::Action a = agent.Act(bits, legal);
    pending[p] = {true, bits, static_cast<std::uint8_t>(game::ActionIndex(a)), legal};
    const agents::TrainStats stats = agent.TrainStep();
    if (stats.q_loss) {
      q_loss_sum_ += *stats.q_loss;
      ++q_loss_count_;
    }
    if (stats.pi_loss) {
      pi_loss_sum_ += *stats.pi_loss;
      ++pi_loss_count_;
    }
    state.Apply(a);
  }
  const auto payoffs = state.Payoffs();
  for (int p = 0; p < game::kNumPlayers; ++p) {
    if (!pending[p].active) continue;
    memory::Transition t;
    t.state = pending[p].state;
    t.action = pending[p].action;
    t.legal = pending[p].legal;
    t.reward = static_cast<float>(payoffs[p]);
    t.terminal = true;
    agents_[p].Observe(t);
  }
  ++episode_;
}

void Trainer::RunEpisodes(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) RunEpisode();
}

exact::StrategyProfile Trainer::Profile(EvalTarget target) const {
  const auto how = ToExtraction(target);
  exact::StrategyProfile profile;
  for (int p = 0; p < game::kNumPlayers; ++p) {
    const auto& net = how == agents::Extraction::kGreedyQ ? agents_[p].q_network()
                                                          : agents_[p].policy_network();
    profile[p] = agents::ExtractStrategy(*spec_, p, net, how);
  }
  return profile;
}

double Trainer::Evaluate() const { return Evaluate(config_.eval_target); }

double Trainer::Evaluate(EvalTarget target) const {
  if (spec_->Enumerable()) return exact::Exploitability(*spec_, Profile(target));
  // Seat p of the network policy uses agent p's network.
  const bool use_q = target == EvalTarget::kGreedyQ;
  std::array<neural::Mlp, game::kNumPlayers> nets;
  for (int p = 0; p < game::kNumPlayers; ++p) {
    nets[p] = use_q ? agents_[p].q_network() : agents_[p].policy_network();
  }
  const NetworkPolicy learner(std::move(nets), target != EvalTarget::kAverage, "nfsp");
  const auto baseline = MakeScripted(config_.eval_baseline);
  MatchOptions options;
  options.hands = config_.eval_hands;
  options.seed = config_.seed;
  return RunMatch(*spec_, learner, *baseline, options).mean_mbbh;
}

MetricsRow Trainer::Row() {
  MetricsRow row;
  row.episode = episode_;
  row.metric = Evaluate();
  if (q_loss_count_ > 0) row.q_loss = q_loss_sum_ / q_loss_count_;
  if (pi_loss_count_ > 0) row.pi_loss = pi_loss_sum_ / pi_loss_count_;
  q_loss_sum_ = pi_loss_sum_ = 0;
  q_loss_count_ = pi_loss_count_ = 0;
  if (config_.record_timing) {
    row.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  return row;
}

void Trainer::Run(const std::function<void(const MetricsRow&)>& on_row) {
  while (episode_ < config_.episodes) {
    try {
      RunEpisode();
    } catch (const neural::NumericalError&) {
      MetricsRow row;
      row.episode = episode_;
      row.metric = std::numeric_limits<double>::quiet_NaN();
      row.q_loss = row.pi_loss = std::numeric_limits<double>::quiet_NaN();
      if (on_row) on_row(row);
      throw;
    }
    if (episode_ % config_.eval_every == 0 || episode_ == config_.episodes) {
      const MetricsRow row = Row();
      if (on_row) on_row(row);
    }
  }
}

void Trainer::set_episode_budget(std::uint64_t episodes) {
  if (episodes == 0) throw ConfigError("episodes must be positive");
  config_.episodes = episodes;
}

void Trainer::SaveCheckpoint(const fs::path& dir) const {
  fs::create_directories(dir);
  SaveConfig(dir / "experiment.json", config_);
  std::ofstream state(dir / "trainer.json");
  state << "{\"episode\": " << episode_ << "}\n";
  if (!state) throw std::runtime_error("failed writing " + (dir / "trainer.json").string());
  for (int p = 0; p < game::kNumPlayers; ++p) {
    SaveAgent(dir / ("agent" + std::to_string(p)), agents_[p]);
  }
}

Trainer Trainer::Resume(const fs::path& dir) {
  ExperimentConfig config = LoadConfig(dir / "experiment.json");
  std::ifstream in(dir / "trainer.json");
  if (!in) throw std::runtime_error("no trainer state in " + dir.string());
  nlohmann::json j;
  std::uint64_t episode = 0;
  try {
    in >> j;
    episode = j.at("episode").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed trainer state: " + std::string(e.what()));
  }
  Trainer trainer(std::move(config), episode);
  const std::uint64_t seed = AgentSeed(trainer.config_.seed, episode);
  for (int p = 0; p < game::kNumPlayers; ++p) {
    const auto snapshot = LoadAgentSnapshot(dir / ("agent" + std::to_string(p)));
    if (snapshot.player != p) throw std::runtime_error("agent seat mismatch in checkpoint");
    trainer.agents_[p] = RestoreAgent(snapshot, *trainer.spec_, seed);
  }
  return trainer;
}

}  // namespace nfsp::harness
