#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nfsp/mlp.hpp"

using namespace nfsp::neural;
using nfsp::game::Action;
using nfsp::game::ActionMask;

namespace {

using DMlp = BasicMlp<double>;

ActionMask Mask(std::initializer_list<Action> actions) {
  ActionMask m;
  for (Action a : actions) m.Set(a);
  return m;
}

// Compares analytic gradients with central differences at a few random
// parameters. Returns the worst relative error.
template <class Loss>
double WorstGradientError(DMlp& net, const Loss& loss, const DMlp::Gradients& grads,
                          std::mt19937_64& rng) {
  const auto analytic = DMlp::Flatten(grads);
  auto params = net.FlatParameters();
  std::uniform_int_distribution<std::size_t> pick(0, params.size() - 1);
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const std::size_t i = pick(rng);
    const double h = 1e-6, saved = params[i];
    params[i] = saved + h;
    net.SetFlatParameters(params);
    const double up = loss();
    params[i] = saved - h;
    net.SetFlatParameters(params);
    const double down = loss();
    params[i] = saved;
    net.SetFlatParameters(params);
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max(std::abs(numeric) + std::abs(analytic[i]), 1e-8);
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

BasicQBatch<double> RandomQBatch(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  BasicQBatch<double> b;
  b.states = DMlp::Matrix::NullaryExpr(2, n, [&] { return u(rng); });
  b.next_states = DMlp::Matrix::NullaryExpr(2, n, [&] { return u(rng); });
  for (int i = 0; i < n; ++i) {
    b.actions.push_back(i % 3);
    b.rewards.push_back(u(rng));
    b.next_legal.push_back(i % 2 ? Mask({Action::kCall, Action::kRaise})
                                 : Mask({Action::kFold, Action::kCall, Action::kRaise}));
    b.terminal.push_back(i % 4 == 0);
  }
  return b;
}

}  // namespace

TEST_CASE("zero network outputs zeros") {
  Mlp net({30, 64, 3});
  const std::vector<float> x(30, 1.0f);
  CHECK(net.Predict(x) == std::vector<float>{0, 0, 0});
  CHECK(net.ParameterCount() == 30 * 64 + 64 + 64 * 3 + 3);
}

TEST_CASE("input width is checked") {
  Mlp net({30, 8, 3});
  const std::vector<float> x(29, 0.0f);
  CHECK_THROWS_AS(net.Predict(x), std::invalid_argument);
}

TEST_CASE("initialisation range") {
  nfsp::game::Rng rng(1);
  Mlp net({30, 64, 3}, rng);
  const float bound = std::sqrt(6.0f / (30 + 64));
  CHECK(net.weights(0).cwiseAbs().maxCoeff() <= bound);
  CHECK(net.weights(0).cwiseAbs().maxCoeff() > 0.9f * bound);
  CHECK(net.biases(0).isZero());
  nfsp::game::Rng again(1);
  CHECK(Mlp({30, 64, 3}, again) == net);
}

TEST_CASE("masked softmax") {
  const std::vector<float> logits{5.0f, 1.0f, 1.0f};
  const auto p = MaskedSoftmax<float>(logits, Mask({Action::kCall, Action::kRaise}));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(p[2] == doctest::Approx(0.5));
  const std::vector<float> huge{1000.0f, -1000.0f, 0.0f};
  const auto q = MaskedSoftmax<float>(huge, Mask({Action::kFold, Action::kCall, Action::kRaise}));
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(q[1]));
}

TEST_CASE("gradients match finite differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    nfsp::game::Rng init(trial);
    DMlp net({2, 4, 3}, init);
    for (int l = 0; l < net.NumLayers(); ++l) net.biases(l).setConstant(0.1);
    nfsp::game::Rng tinit(100 + trial);
    const DMlp target({2, 4, 3}, tinit);

    SUBCASE("q loss") {
      const auto batch = RandomQBatch(rng, 8);
      DMlp::Gradients g;
      QLoss(net, target, batch, &g);
      const double err = WorstGradientError(
          net, [&] { return QLoss<double>(net, target, batch, nullptr); }, g, rng);
      CHECK(err < 1e-4);
    }
    SUBCASE("policy loss") {
      auto q = RandomQBatch(rng, 8);
      BasicPolicyBatch<double> batch{q.states, {}, {}};
      for (int i = 0; i < 8; ++i) {
        batch.actions.push_back(1 + i % 2);
        batch.legal.push_back(i % 3 ? Mask({Action::kCall, Action::kRaise})
                                    : Mask({Action::kFold, Action::kCall, Action::kRaise}));
      }
      DMlp::Gradients g;
      PolicyLoss(net, batch, &g);
      const double err = WorstGradientError(
          net, [&] { return PolicyLoss<double>(net, batch, nullptr); }, g, rng);
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("q regression on a terminal reward converges") {
  nfsp::game::Rng rng(3);
  Mlp net({4, 16, 3}, rng);
  TargetNetwork target;
  target.Refit(net);
  QBatch b;
  b.states = Mlp::Matrix::Zero(4, 16);
  b.states.row(1).setOnes();
  b.next_states = Mlp::Matrix::Zero(4, 16);
  for (int i = 0; i < 16; ++i) {
    b.actions.push_back(2);
    b.rewards.push_back(0.7f);
    b.next_legal.push_back(ActionMask());
    b.terminal.push_back(1);
  }
  for (int step = 0; step < 500; ++step) QUpdate(net, target, b, SgdConfig{0.1, 16});
  const std::vector<float> x{0, 1, 0, 0};
  CHECK(net.Predict(x)[2] == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(target.staleness == 500);
}

TEST_CASE("policy classification") {
  nfsp::game::Rng rng(4);
  PolicyBatch b;
  b.states = Mlp::Matrix::Zero(4, 64);
  b.states.row(0).setOnes();
  const auto legal = Mask({Action::kCall, Action::kRaise});
  SUBCASE("a single target action") {
    Mlp net({4, 16, 3}, rng);
    for (int i = 0; i < 64; ++i) {
      b.actions.push_back(1);
      b.legal.push_back(legal);
    }
    for (int step = 0; step < 2000; ++step) PolicyUpdate(net, b, SgdConfig{0.1, 64});
    const std::vector<float> x{1, 0, 0, 0};
    const auto p = MaskedSoftmax<float>(net.Predict(x), legal);
    CHECK(p[1] > 0.99);
  }
  SUBCASE("mixed targets give their frequencies") {
    Mlp net({4, 16, 3}, rng);
    for (int i = 0; i < 64; ++i) {
      b.actions.push_back(1 + i % 2);
      b.legal.push_back(legal);
    }
    for (int step = 0; step < 2000; ++step) PolicyUpdate(net, b, SgdConfig{0.1, 64});
    const std::vector<float> x{1, 0, 0, 0};
    const auto p = MaskedSoftmax<float>(net.Predict(x), legal);
    CHECK(p[1] == doctest::Approx(0.5).epsilon(0.02));
  }
}

TEST_CASE("target network is a frozen copy") {
  nfsp::game::Rng rng(5);
  Mlp net({3, 4, 3}, rng);
  TargetNetwork target;
  target.Refit(net);
  CHECK(target.net == net);
  net.weights(0)(0, 0) += 1.0f;
  CHECK_FALSE(target.net == net);
  target.Refit(net);
  CHECK(target.net == net);
  CHECK(target.refits == 2);
  CHECK(target.staleness == 0);
}

TEST_CASE("non-finite losses are reported") {
  Mlp net({2, 2, 3});
  TargetNetwork target;
  target.Refit(net);
  QBatch b;
  b.states = Mlp::Matrix::Zero(2, 1);
  b.next_states = Mlp::Matrix::Zero(2, 1);
  b.actions = {1};
  b.rewards = {std::numeric_limits<float>::infinity()};
  b.next_legal = {ActionMask()};
  b.terminal = {1};
  CHECK_THROWS_AS(QUpdate(net, target, b, SgdConfig{}), NumericalError);
}

TEST_CASE("checkpoint round trip") {
  nfsp::game::Rng rng(6);
  const Mlp net({30, 64, 64, 3}, rng);
  std::stringstream ss;
  WriteMlp(ss, net);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == "NFSPMLP1");
  CHECK(bytes.size() == 8 + 4 + 4 * 4 + 4 * net.ParameterCount());
  const Mlp back = ReadMlp(ss);
  CHECK(back == net);
  std::stringstream bad("NOTANMLP");
  CHECK_THROWS(ReadMlp(bad));
}
