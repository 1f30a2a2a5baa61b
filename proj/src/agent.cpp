#include "nfsp/agent.hpp"

#include <cmath>
#include <stdexcept>

#include "nfsp/game_tree.hpp"

namespace nfsp::agents {

using game::Action;
using game::ActionMask;
using game::EncodingBits;
using neural::Mlp;

namespace {

void Require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw std::invalid_argument("agent config: " + field + " " + rule);
}

game::Rng Stream(std::uint64_t seed, int player, std::uint64_t stream) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(player), stream};
  return game::Rng(seq);
}

std::uint64_t StreamSeed(std::uint64_t seed, int player, std::uint64_t stream) {
  return Stream(seed, player, stream)();
}

void SetColumn(Mlp::Matrix& m, Eigen::Index col, const EncodingBits& bits) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, col) = static_cast<float>((bits[i / 64] >> (i % 64)) & 1u);
  }
}

Mlp::Matrix Column(const EncodingBits& bits, int rows) {
  Mlp::Matrix m(rows, 1);
  SetColumn(m, 0, bits);
  return m;
}

// Ties go to the lowest action index.
template <class Values>
Action Argmax(const Values& values, ActionMask legal) {
  int best = -1;
  for (Action a : game::kAllActions) {
    if (!legal.Contains(a)) continue;
    const int k = game::ActionIndex(a);
    if (best < 0 || values[k] > values[best]) best = k;
  }
  return static_cast<Action>(best);
}

}  // namespace

void AgentConfig::Validate() const {
  Require(!hidden_layers.empty(), "hidden_layers", "must be nonempty");
  for (int h : hidden_layers) Require(h > 0, "hidden_layers", "must be positive");
  Require(eta >= 0 && eta <= 1, "eta", "must lie in [0, 1]");
  Require(epsilon_start >= 0 && epsilon_start <= 1, "epsilon_start", "must lie in [0, 1]");
  Require(epsilon_horizon > 0, "epsilon_horizon", "must be positive");
  Require(rl_capacity > 0, "rl_capacity", "must be positive");
  Require(sl_capacity > 0, "sl_capacity", "must be positive");
  Require(sl_min_probability >= 0 && sl_min_probability <= 1, "sl_min_probability",
          "must lie in [0, 1]");
  Require(rl_learning_rate > 0, "rl_learning_rate", "must be positive");
  Require(sl_learning_rate > 0, "sl_learning_rate", "must be positive");
  Require(batch_size > 0, "batch_size", "must be positive");
  Require(steps_per_update > 0, "steps_per_update", "must be positive");
  Require(updates_per_round > 0, "updates_per_round", "must be positive");
  Require(target_refit_every > 0, "target_refit_every", "must be positive");
  Require(reward_scale > 0, "reward_scale", "must be positive");
}

std::vector<int> LayerSizes(const game::GameSpec& spec, const std::vector<int>& hidden) {
  std::vector<int> sizes{spec.EncodingSize()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(game::kNumActions);
  return sizes;
}

NfspAgent::NfspAgent(const game::GameSpec& spec, int player, AgentConfig config,
                     std::uint64_t seed)
    : spec_(&spec),
      player_(player),
      config_((config.Validate(), std::move(config))),
      rl_memory_(config_.rl_kind, config_.rl_capacity, config_.sl_min_probability,
                 StreamSeed(seed, player, 1)),
      sl_memory_(config_.sl_kind, config_.sl_capacity, config_.sl_min_probability,
                 StreamSeed(seed, player, 2)),
      mode_rng_(Stream(seed, player, 3)),
      act_rng_(Stream(seed, player, 4)),
      q_batch_rng_(Stream(seed, player, 5)),
      pi_batch_rng_(Stream(seed, player, 6)) {
  if (player < 0 || player >= game::kNumPlayers) {
    throw std::invalid_argument("player must be 0 or 1");
  }
  game::Rng init = Stream(seed, player, 0);
  const auto sizes = LayerSizes(spec, config_.hidden_layers);
  q_net_ = Mlp(sizes, init);
  pi_net_ = Mlp(sizes, init);
  target_.net = q_net_;
}

void NfspAgent::SetNetworks(Mlp q_net, Mlp pi_net) {
  const auto sizes = LayerSizes(*spec_, config_.hidden_layers);
  if (q_net.layer_sizes() != sizes || pi_net.layer_sizes() != sizes) {
    throw std::invalid_argument("network shape does not match the agent config");
  }
  q_net_ = std::move(q_net);
  pi_net_ = std::move(pi_net);
  target_.net = q_net_;
  target_.staleness = 0;
}

PolicyMode NfspAgent::BeginEpisode() {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(mode_rng_);
  mode_ = u < config_.eta ? PolicyMode::kBestResponse : PolicyMode::kAveragePolicy;
  if (mode_ == PolicyMode::kBestResponse) ++counters_.best_response_episodes;
  ++counters_.episodes;
  return mode_;
}

double NfspAgent::Epsilon() const {
  const double k = config_.decay_unit == DecayUnit::kEpisodes
                       ? static_cast<double>(counters_.episodes)
                       : static_cast<double>(counters_.q_updates);
  return config_.epsilon_start / std::sqrt(1.0 + k / config_.epsilon_horizon);
}

std::vector<float> NfspAgent::QValues(const EncodingBits& state) const {
  const Mlp::Matrix q = q_net_.Forward(Column(state, q_net_.InputSize()));
  return {q.data(), q.data() + q.size()};
}

std::vector<double> NfspAgent::AveragePolicy(const EncodingBits& state,
                                             ActionMask legal) const {
  const Mlp::Matrix logits = pi_net_.Forward(Column(state, pi_net_.InputSize()));
  return neural::MaskedSoftmax<float>(
      std::span<const float>(logits.data(), logits.size()), legal);
}

Action NfspAgent::Act(const EncodingBits& state, ActionMask legal) {
  if (legal.empty()) throw std::invalid_argument("no legal actions");
  if (mode_ == PolicyMode::kBestResponse) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(act_rng_);
    if (u < Epsilon()) {
      const auto actions = legal.Actions();
      return actions[std::uniform_int_distribution<std::size_t>(
          0, actions.size() - 1)(act_rng_)];
    }
    return Argmax(QValues(state), legal);
  }
  const auto p = AveragePolicy(state, legal);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(act_rng_);
  double acc = 0;
  Action last = Action::kFold;
  for (Action a : legal.Actions()) {
    acc += p[game::ActionIndex(a)];
    last = a;
    if (u < acc) return a;
  }
  return last;
}

Action NfspAgent::Act(const game::InfoState& info) {
  EncodingBits bits{};
  for (std::size_t i = 0; i < info.encoding.size(); ++i) {
    if (info.encoding[i] != 0.0f) bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return Act(bits, info.legal);
}

void NfspAgent::Observe(const memory::Transition& transition) {
  rl_memory_.Push(transition);
  if (mode_ == PolicyMode::kBestResponse) {
    sl_memory_.Push({transition.state, transition.action, transition.legal});
  }
}

TrainStats NfspAgent::TrainStep() {
  TrainStats stats;
  ++counters_.steps;
  if (counters_.steps % static_cast<std::uint64_t>(config_.steps_per_update) != 0) {
    return stats;
  }
  for (int i = 0; i < config_.updates_per_round; ++i) {
    UpdateQ(stats);
    if (config_.train_average_policy) UpdatePolicy(stats);
  }
  if (stats.q_updates > 0) *stats.q_loss /= stats.q_updates;
  if (stats.pi_updates > 0) *stats.pi_loss /= stats.pi_updates;
  return stats;
}

void NfspAgent::UpdateQ(TrainStats& stats) {
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  if (rl_memory_.size() < batch_size) return;
  const auto sample = rl_memory_.Sample(batch_size, q_batch_rng_);
  const int rows = q_net_.InputSize();
  neural::QBatch batch;
  batch.states.resize(rows, config_.batch_size);
  batch.next_states.resize(rows, config_.batch_size);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& t = sample[i];
    SetColumn(batch.states, i, t.state);
    SetColumn(batch.next_states, i, t.next_state);
    batch.actions.push_back(t.action);
    batch.rewards.push_back(static_cast<float>(t.reward * config_.reward_scale));
    batch.next_legal.push_back(t.next_legal);
    batch.terminal.push_back(t.terminal ? 1 : 0);
  }
  const double loss = neural::QUpdate(
      q_net_, target_, batch, {config_.rl_learning_rate, config_.batch_size});
  ++counters_.q_updates;
  ++stats.q_updates;
  stats.q_loss = stats.q_loss.value_or(0.0) + loss;
  if (target_.staleness >= config_.target_refit_every) {
    if (!q_net_.AllFinite()) throw neural::NumericalError("non-finite Q parameters");
    target_.Refit(q_net_);
  }
}

void NfspAgent::UpdatePolicy(TrainStats& stats) {
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  if (sl_memory_.size() < batch_size) return;
  const auto sample = sl_memory_.Sample(batch_size, pi_batch_rng_);
  neural::PolicyBatch batch;
  batch.states.resize(pi_net_.InputSize(), config_.batch_size);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    SetColumn(batch.states, i, sample[i].state);
    batch.actions.push_back(sample[i].action);
    batch.legal.push_back(sample[i].legal);
  }
  const double loss =
      neural::PolicyUpdate(pi_net_, batch, {config_.sl_learning_rate, config_.batch_size});
  ++counters_.pi_updates;
  ++stats.pi_updates;
  stats.pi_loss = stats.pi_loss.value_or(0.0) + loss;
}

exact::BehaviouralStrategy ExtractStrategy(const game::GameSpec& spec, int player,
                                           const Mlp& net, Extraction how) {
  if (!spec.Enumerable()) {
    throw std::length_error("cannot tabulate a strategy for " + spec.name);
  }
  const exact::GameTree& tree = exact::TreeFor(spec);
  const auto ids = tree.PlayerInfosets(player);
  Mlp::Matrix inputs(net.InputSize(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    SetColumn(inputs, i, tree.infosets()[ids[i]].encoding);
  }
  const Mlp::Matrix out = net.Forward(inputs);
  exact::BehaviouralStrategy strategy;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& info = tree.infosets()[ids[i]];
    std::span<const float> col(out.col(i).data(), out.rows());
    std::vector<double> full;
    if (how == Extraction::kAverage) {
      full = neural::MaskedSoftmax<float>(col, info.legal);
    } else {
      full.assign(game::kNumActions, 0.0);
      full[game::ActionIndex(Argmax(col, info.legal))] = 1.0;
    }
    std::vector<double> row;
    for (Action a : info.legal.Actions()) row.push_back(full[game::ActionIndex(a)]);
    strategy.emplace(info.key, std::move(row));
  }
  return strategy;
}

exact::BehaviouralStrategy ExtractAverageStrategy(const NfspAgent& agent) {
  return ExtractStrategy(agent.spec(), agent.player(), agent.policy_network(),
                         Extraction::kAverage);
}

exact::BehaviouralStrategy ExtractGreedyAverage(const NfspAgent& agent) {
  return ExtractStrategy(agent.spec(), agent.player(), agent.policy_network(),
                         Extraction::kGreedyAverage);
}

exact::BehaviouralStrategy ExtractBestResponse(const NfspAgent& agent) {
  return ExtractStrategy(agent.spec(), agent.player(), agent.q_network(),
                         Extraction::kGreedyQ);
}

}  // namespace nfsp::agents
