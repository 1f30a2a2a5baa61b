#include "nfsp/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace nfsp::neural {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class Scalar>
BasicMlp<Scalar>::BasicMlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) {
    throw std::invalid_argument("an MLP needs at least input and output sizes");
  }
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
    biases_.push_back(Vector::Zero(sizes_[l + 1]));
  }
}

template <class Scalar>
BasicMlp<Scalar>::BasicMlp(std::vector<int> layer_sizes, game::Rng& rng)
    : BasicMlp(std::move(layer_sizes)) {
  for (auto& w : weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Row-major fill keeps initialisation independent of storage order.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(dist(rng));
    }
  }
}

template <class Scalar>
void BasicMlp<Scalar>::CheckInput(const Matrix& inputs) const {
  if (weights_.empty()) throw std::invalid_argument("forward pass on an empty network");
  if (inputs.rows() != InputSize()) {
    throw std::invalid_argument("input width " + std::to_string(inputs.rows()) +
                                " does not match network input " +
                                std::to_string(InputSize()));
  }
}

template <class Scalar>
typename BasicMlp<Scalar>::Matrix BasicMlp<Scalar>::Forward(const Matrix& inputs) const {
  CheckInput(inputs);
  Matrix a = inputs;
  for (int l = 0; l < NumLayers(); ++l) {
    Matrix z = weights_[l] * a;
    z.colwise() += biases_[l];
    if (l + 1 < NumLayers()) z = z.cwiseMax(Scalar(0));
    a = std::move(z);
  }
  return a;
}

template <class Scalar>
typename BasicMlp<Scalar>::Matrix BasicMlp<Scalar>::Forward(const Matrix& inputs,
                                                            Cache& cache) const {
  CheckInput(inputs);
  cache.activations.assign(1, inputs);
  cache.pre_activations.clear();
  for (int l = 0; l < NumLayers(); ++l) {
    Matrix z = weights_[l] * cache.activations.back();
    z.colwise() += biases_[l];
    cache.pre_activations.push_back(z);
    if (l + 1 < NumLayers()) {
      cache.activations.push_back(z.cwiseMax(Scalar(0)));
    } else {
      cache.activations.push_back(std::move(z));
    }
  }
  return cache.activations.back();
}

template <class Scalar>
std::vector<Scalar> BasicMlp<Scalar>::Predict(std::span<const float> input) const {
  Matrix x(static_cast<Eigen::Index>(input.size()), 1);
  for (std::size_t i = 0; i < input.size(); ++i) x(i, 0) = static_cast<Scalar>(input[i]);
  const Matrix y = Forward(x);
  return std::vector<Scalar>(y.data(), y.data() + y.size());
}

template <class Scalar>
typename BasicMlp<Scalar>::Gradients BasicMlp<Scalar>::Backward(
    const Cache& cache, const Matrix& output_grad) const {
  Gradients g;
  g.weights.resize(NumLayers());
  g.biases.resize(NumLayers());
  Matrix delta = output_grad;
  for (int l = NumLayers() - 1; l >= 0; --l) {
    g.weights[l] = delta * cache.activations[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Matrix back = weights_[l].transpose() * delta;
      delta = back.cwiseProduct(
          (cache.pre_activations[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return g;
}

template <class Scalar>
void BasicMlp<Scalar>::ApplyGradients(const Gradients& grads, Scalar learning_rate) {
  for (int l = 0; l < NumLayers(); ++l) {
    weights_[l].noalias() -= learning_rate * grads.weights[l];
    biases_[l].noalias() -= learning_rate * grads.biases[l];
  }
}

template <class Scalar>
std::size_t BasicMlp<Scalar>::ParameterCount() const {
  std::size_t n = 0;
  for (int l = 0; l < NumLayers(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

template <class Scalar>
std::vector<Scalar> BasicMlp<Scalar>::FlatParameters() const {
  std::vector<Scalar> out;
  out.reserve(ParameterCount());
  for (int l = 0; l < NumLayers(); ++l) {
    const Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) out.push_back(biases_[l](r));
  }
  return out;
}

template <class Scalar>
std::vector<Scalar> BasicMlp<Scalar>::Flatten(const Gradients& grads) {
  std::vector<Scalar> out;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    const Matrix& w = grads.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < grads.biases[l].size(); ++r) {
      out.push_back(grads.biases[l](r));
    }
  }
  return out;
}

template <class Scalar>
void BasicMlp<Scalar>::SetFlatParameters(std::span<const Scalar> params) {
  if (params.size() != ParameterCount()) {
    throw std::invalid_argument("parameter count mismatch");
  }
  std::size_t k = 0;
  for (int l = 0; l < NumLayers(); ++l) {
    Matrix& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = params[k++];
  }
}

template <class Scalar>
bool BasicMlp<Scalar>::AllFinite() const {
  for (int l = 0; l < NumLayers(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

template <class Scalar>
std::vector<double> MaskedSoftmax(std::span<const Scalar> logits, game::ActionMask legal) {
  std::vector<double> p(logits.size(), 0.0);
  double high = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (legal.Contains(static_cast<game::Action>(a))) {
      high = std::max(high, static_cast<double>(logits[a]));
    }
  }
  double sum = 0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (legal.Contains(static_cast<game::Action>(a))) {
      p[a] = std::exp(static_cast<double>(logits[a]) - high);
      sum += p[a];
    }
  }
  for (double& v : p) v /= sum;
  return p;
}

template <class Scalar>
Scalar QLoss(const BasicMlp<Scalar>& net, const BasicMlp<Scalar>& target,
             const BasicQBatch<Scalar>& batch,
             typename BasicMlp<Scalar>::Gradients* grads) {
  using Matrix = typename BasicMlp<Scalar>::Matrix;
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("empty Q batch");
  typename BasicMlp<Scalar>::Cache cache;
  const Matrix q = net.Forward(batch.states, cache);
  const Matrix next_q = target.Forward(batch.next_states);
  Matrix output_grad = Matrix::Zero(q.rows(), q.cols());
  double loss = 0;
  for (int i = 0; i < n; ++i) {
    double y = batch.rewards[i];
    if (!batch.terminal[i]) {
      double best = -std::numeric_limits<double>::infinity();
      for (game::Action a : batch.next_legal[i].Actions()) {
        best = std::max(best, static_cast<double>(next_q(game::ActionIndex(a), i)));
      }
      y += best;
    }
    const double err = static_cast<double>(q(batch.actions[i], i)) - y;
    loss += err * err;
    output_grad(batch.actions[i], i) = static_cast<Scalar>(2.0 * err / n);
  }
  loss /= n;
  if (grads != nullptr) *grads = net.Backward(cache, output_grad);
  return static_cast<Scalar>(loss);
}

template <class Scalar>
Scalar PolicyLoss(const BasicMlp<Scalar>& net, const BasicPolicyBatch<Scalar>& batch,
                  typename BasicMlp<Scalar>::Gradients* grads) {
  using Matrix = typename BasicMlp<Scalar>::Matrix;
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("empty policy batch");
  typename BasicMlp<Scalar>::Cache cache;
  const Matrix logits = net.Forward(batch.states, cache);
  Matrix output_grad = Matrix::Zero(logits.rows(), logits.cols());
  double loss = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = MaskedSoftmax<Scalar>(
        std::span<const Scalar>(logits.col(i).data(), logits.rows()), batch.legal[i]);
    const int a = batch.actions[i];
    const double log_p = p[a] > 0 ? std::log(p[a]) : -std::numeric_limits<double>::infinity();
    if (log_p < kMinLogProbability) {
      loss -= kMinLogProbability;  // clamped: no gradient
      continue;
    }
    loss -= log_p;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double indicator = static_cast<int>(k) == a ? 1.0 : 0.0;
      output_grad(k, i) = static_cast<Scalar>((p[k] - indicator) / n);
    }
  }
  loss /= n;
  if (grads != nullptr) *grads = net.Backward(cache, output_grad);
  return static_cast<Scalar>(loss);
}

namespace {

void CheckConfig(const SgdConfig& config) {
  if (!(config.learning_rate > 0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
}

}  // namespace

template <class Scalar>
Scalar QUpdate(BasicMlp<Scalar>& net, BasicTargetNetwork<Scalar>& target,
               const BasicQBatch<Scalar>& batch, const SgdConfig& config) {
  CheckConfig(config);
  typename BasicMlp<Scalar>::Gradients grads;
  const Scalar loss = QLoss(net, target.net, batch, &grads);
  if (!std::isfinite(static_cast<double>(loss))) {
    throw NumericalError("non-finite Q loss");
  }
  net.ApplyGradients(grads, static_cast<Scalar>(config.learning_rate));
  ++target.staleness;
  return loss;
}

template <class Scalar>
Scalar PolicyUpdate(BasicMlp<Scalar>& net, const BasicPolicyBatch<Scalar>& batch,
                    const SgdConfig& config) {
  CheckConfig(config);
  typename BasicMlp<Scalar>::Gradients grads;
  const Scalar loss = PolicyLoss(net, batch, &grads);
  if (!std::isfinite(static_cast<double>(loss))) {
    throw NumericalError("non-finite policy loss");
  }
  net.ApplyGradients(grads, static_cast<Scalar>(config.learning_rate));
  return loss;
}

namespace {

constexpr char kMagic[8] = {'N', 'F', 'S', 'P', 'M', 'L', 'P', '1'};

void WriteU32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t ReadU32(std::istream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error("truncated network checkpoint");
  }
  return v;
}

}  // namespace

void WriteMlp(std::ostream& os, const Mlp& net) {
  os.write(kMagic, sizeof kMagic);
  WriteU32(os, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) WriteU32(os, static_cast<std::uint32_t>(s));
  const auto params = net.FlatParameters();
  os.write(reinterpret_cast<const char*>(params.data()),
           static_cast<std::streamsize>(params.size() * sizeof(float)));
  if (!os) throw std::runtime_error("failed writing network checkpoint");
}

Mlp ReadMlp(std::istream& is) {
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not a network checkpoint (bad magic)");
  }
  const std::uint32_t n = ReadU32(is);
  if (n < 2 || n > 64) throw std::runtime_error("bad layer count in checkpoint");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t s = ReadU32(is);
    if (s == 0 || s > (1u << 20)) throw std::runtime_error("bad layer size in checkpoint");
    sizes.push_back(static_cast<int>(s));
  }
  Mlp net(sizes);
  std::vector<float> params(net.ParameterCount());
  if (!is.read(reinterpret_cast<char*>(params.data()),
               static_cast<std::streamsize>(params.size() * sizeof(float)))) {
    throw std::runtime_error("truncated network checkpoint");
  }
  net.SetFlatParameters(params);
  return net;
}

template class BasicMlp<float>;
template class BasicMlp<double>;
template std::vector<double> MaskedSoftmax<float>(std::span<const float>, game::ActionMask);
template std::vector<double> MaskedSoftmax<double>(std::span<const double>, game::ActionMask);
template float QLoss(const Mlp&, const Mlp&, const QBatch&, Mlp::Gradients*);
template double QLoss(const BasicMlp<double>&, const BasicMlp<double>&,
                      const BasicQBatch<double>&, BasicMlp<double>::Gradients*);
template float PolicyLoss(const Mlp&, const PolicyBatch&, Mlp::Gradients*);
template double PolicyLoss(const BasicMlp<double>&, const BasicPolicyBatch<double>&,
                           BasicMlp<double>::Gradients*);
template float QUpdate(Mlp&, TargetNetwork&, const QBatch&, const SgdConfig&);
template double QUpdate(BasicMlp<double>&, BasicTargetNetwork<double>&,
                        const BasicQBatch<double>&, const SgdConfig&);
template float PolicyUpdate(Mlp&, const PolicyBatch&, const SgdConfig&);
template double PolicyUpdate(BasicMlp<double>&, const BasicPolicyBatch<double>&,
                             const SgdConfig&);

}  // namespace nfsp::neural
