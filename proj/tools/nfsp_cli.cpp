// nfsp: command line front end.
//
//   nfsp xfp --game leduc --iterations 1000 --stepsize harmonic --csv xfp.csv
//   nfsp train --config configs/leduc_nfsp.json
//   nfsp exploit --game leduc strategy.json
//   nfsp match --game lhe --a always_fold --b always_call --hands 10000
//   nfsp encode-check lhe

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "nfsp/checkpoint.hpp"
#include "nfsp/config.hpp"
#include "nfsp/exact.hpp"
#include "nfsp/match.hpp"
#include "nfsp/strategy_io.hpp"
#include "nfsp/trainer.hpp"

namespace fs = std::filesystem;
using namespace nfsp;

namespace {

// "-" means stdout.
class Output {
 public:
  Output(const std::string& path, bool append = false) {
    if (path == "-" || path.empty()) {
      os_ = &std::cout;
    } else {
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      file_.open(path, append ? std::ios::app : std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int RunXfp(const std::string& game_name, int iterations, const std::string& stepsize,
           double noise, int eval_every, std::uint64_t seed, const std::string& csv,
           const std::string& strategy_path, bool timing) {
  const auto& spec = game::GameSpecByName(game_name);
  exact::XfpOptions options;
  options.iterations = iterations;
  options.schedule = exact::StepsizeSchedule::Parse(stepsize);
  options.br_noise = noise;
  options.eval_every = eval_every;
  options.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const auto result = exact::RunXfp(spec, options);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Output out(csv);
  harness::WriteCsvHeader(*out);
  for (const auto& point : result.curve) {
    harness::MetricsRow row;
    row.episode = point.iteration;
    row.metric = point.exploitability;
    if (timing && point.iteration == iterations) row.wall_clock_s = elapsed;
    harness::WriteCsvRow(*out, row);
  }
  if (!strategy_path.empty()) {
    exact::SaveStrategy(strategy_path,
                        exact::ProfileFromTable(exact::TreeFor(spec), result.average));
  }
  return 0;
}

int RunTrain(const std::string& config_path, const std::string& resume,
             const std::optional<std::uint64_t>& seed,
             const std::optional<std::uint64_t>& episodes, const std::string& metrics,
             const std::string& checkpoint_dir) {
  std::unique_ptr<harness::Trainer> trainer;
  harness::ExperimentConfig config;
  if (!resume.empty()) {
    if (seed || !config_path.empty()) {
      throw harness::ConfigError("--seed and --config cannot be combined with --resume");
    }
    trainer = std::make_unique<harness::Trainer>(harness::Trainer::Resume(resume));
    config = trainer->config();
  } else {
    config = harness::LoadConfig(config_path);
    if (seed) config.seed = *seed;
  }
  if (episodes) config.episodes = *episodes;
  if (!metrics.empty()) config.metrics_path = metrics;
  if (!checkpoint_dir.empty()) config.checkpoint_dir = checkpoint_dir;
  config.Validate();
  if (trainer) {
    if (config.episodes < trainer->episode()) {
      throw harness::ConfigError("checkpoint is already past the episode budget");
    }
    trainer->set_episode_budget(config.episodes);
  } else {
    trainer = std::make_unique<harness::Trainer>(config);
  }

  const bool append = !resume.empty() && fs::exists(config.metrics_path);
  Output out(config.metrics_path, append);
  if (!append) harness::WriteCsvHeader(*out);
  const fs::path ckpt(config.checkpoint_dir);
  trainer->Run([&](const harness::MetricsRow& row) {
    harness::WriteCsvRow(*out, row);
    (*out).flush();
    if (config.checkpoint_every > 0 && row.episode % config.checkpoint_every == 0 &&
        !config.checkpoint_dir.empty()) {
      trainer->SaveCheckpoint(ckpt / ("episode_" + std::to_string(row.episode)));
    }
  });
  if (!config.checkpoint_dir.empty()) trainer->SaveCheckpoint(ckpt / "final");
  return 0;
}

std::unique_ptr<harness::Policy> ResolvePolicy(const game::GameSpec& spec,
                                               const std::string& ref) {
  const auto colon = ref.find(':');
  if (colon == std::string::npos) return harness::MakeScripted(ref);
  const std::string kind = ref.substr(0, colon);
  const std::string path = ref.substr(colon + 1);
  if (kind == "strategy") {
    return std::make_unique<harness::TabularPolicy>(exact::LoadStrategy(path, spec), ref);
  }
  if (kind == "checkpoint" || kind == "checkpoint-greedy" || kind == "checkpoint-q") {
    std::array<neural::Mlp, game::kNumPlayers> nets;
    for (int p = 0; p < game::kNumPlayers; ++p) {
      const auto snap =
          harness::LoadAgentSnapshot(fs::path(path) / ("agent" + std::to_string(p)));
      nets[p] = kind == "checkpoint-q" ? snap.q_net : snap.pi_net;
      if (nets[p].InputSize() != spec.EncodingSize()) {
        throw std::runtime_error("checkpoint " + path + " was not trained on " + spec.name);
      }
    }
    return std::make_unique<harness::NetworkPolicy>(std::move(nets), kind != "checkpoint",
                                                    ref);
  }
  throw std::invalid_argument("unknown policy reference '" + ref + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural fictitious self-play and exact poker analysis"};
  app.require_subcommand(1);

  std::string game_name = "leduc";
  std::uint64_t seed = 0;

  auto* xfp = app.add_subcommand("xfp", "full-width extensive-form fictitious play");
  int iterations = 1000;
  std::string stepsize = "harmonic";
  double noise = 0.0;
  int eval_every = 1;
  std::string csv = "-";
  std::string strategy_out;
  bool timing = false;
  xfp->add_option("--game", game_name, "kuhn or leduc")->capture_default_str();
  xfp->add_option("--iterations", iterations)->capture_default_str();
  xfp->add_option("--stepsize", stepsize, "harmonic or a constant in (0, 1]")
      ->capture_default_str();
  xfp->add_option("--br-noise", noise, "epsilon of the noisy best response")
      ->capture_default_str();
  xfp->add_option("--eval-every", eval_every)->capture_default_str();
  xfp->add_option("--seed", seed)->capture_default_str();
  xfp->add_option("--csv", csv, "metrics CSV, - for stdout")->capture_default_str();
  xfp->add_option("--strategy", strategy_out, "write the final average strategy (JSON)");
  xfp->add_flag("--timing", timing, "fill in wall_clock_s (breaks byte determinism)");

  auto* train = app.add_subcommand("train", "NFSP self-play training");
  std::string config_path, resume, metrics, checkpoint_dir;
  std::optional<std::uint64_t> train_seed, episodes;
  train->add_option("--config", config_path, "experiment config (JSON)");
  train->add_option("--resume", resume, "checkpoint directory to continue from");
  train->add_option("--seed", train_seed, "override the config seed");
  train->add_option("--episodes", episodes, "override the episode budget");
  train->add_option("--metrics", metrics, "override metrics_path (- for stdout)");
  train->add_option("--checkpoint-dir", checkpoint_dir, "override checkpoint_dir");

  auto* exploit = app.add_subcommand("exploit", "exploitability of a strategy file");
  std::string strategy_in;
  exploit->add_option("--game", game_name)->capture_default_str();
  exploit->add_option("strategy", strategy_in, "strategy JSON")->required();

  auto* match = app.add_subcommand("match", "duplicate head-to-head match");
  std::string ref_a, ref_b;
  std::uint64_t hands = 10000;
  bool independent = false;
  match->add_option("--game", game_name)->capture_default_str();
  match->add_option("--a", ref_a,
                    "always_fold|always_call|always_raise|uniform|strategy:FILE|"
                    "checkpoint[-greedy|-q]:DIR")
      ->required();
  match->add_option("--b", ref_b, "as --a")->required();
  match->add_option("--hands", hands)->capture_default_str();
  match->add_option("--seed", seed)->capture_default_str();
  match->add_flag("--independent", independent, "fresh cards every hand, no seat swap");

  auto* encode = app.add_subcommand("encode-check", "print encoding dimensions");
  std::string encode_game;
  encode->add_option("game", encode_game, "kuhn, leduc or lhe")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*xfp) {
      return RunXfp(game_name, iterations, stepsize, noise, eval_every, seed, csv,
                    strategy_out, timing);
    }
    if (*train) {
      if (config_path.empty() && resume.empty()) {
        throw harness::ConfigError("train needs --config or --resume");
      }
      return RunTrain(config_path, resume, train_seed, episodes, metrics, checkpoint_dir);
    }
    if (*exploit) {
      const auto& spec = game::GameSpecByName(game_name);
      const auto profile = exact::LoadStrategy(strategy_in, spec);
      std::cout << Fmt(exact::Exploitability(spec, profile)) << '\n';
      return 0;
    }
    if (*match) {
      const auto& spec = game::GameSpecByName(game_name);
      const auto a = ResolvePolicy(spec, ref_a);
      const auto b = ResolvePolicy(spec, ref_b);
      harness::MatchOptions options;
      options.hands = hands;
      options.seed = seed;
      options.duplicate = !independent;
      const auto r = harness::RunMatch(spec, *a, *b, options);
      std::cout << "hands,mean_mbbh,std_error\n"
                << r.hands << ',' << Fmt(r.mean_mbbh) << ',' << Fmt(r.std_error) << '\n';
      return 0;
    }
    if (*encode) {
      const auto& spec = game::GameSpecByName(encode_game);
      std::cout << spec.EncodingSize() << '\n'
                << "cards=" << spec.CardSectionSize() << " (" << spec.num_rounds << "x"
                << spec.CardBlockSize() << ") betting=" << spec.BettingSectionSize()
                << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
