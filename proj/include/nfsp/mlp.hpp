#pragma once

// Fully connected ReLU networks trained with plain SGD, the two NFSP losses
// (mean squared TD error for Q, negative log-likelihood for the average
// policy) and frozen target copies.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "nfsp/game.hpp"

namespace nfsp::neural {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Scalar>
class BasicMlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  // Pre-activations and activations of one batch, kept for backprop.
  struct Cache {
    std::vector<Matrix> activations;  // [0] is the input
    std::vector<Matrix> pre_activations;
  };

  BasicMlp() = default;
  // All parameters zero.
  explicit BasicMlp(std::vector<int> layer_sizes);
  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  BasicMlp(std::vector<int> layer_sizes, game::Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int InputSize() const { return sizes_.front(); }
  int OutputSize() const { return sizes_.back(); }
  int NumLayers() const { return static_cast<int>(weights_.size()); }
  Matrix& weights(int layer) { return weights_[layer]; }
  const Matrix& weights(int layer) const { return weights_[layer]; }
  Vector& biases(int layer) { return biases_[layer]; }
  const Vector& biases(int layer) const { return biases_[layer]; }

  // Inputs are columns. Throws std::invalid_argument on a width mismatch.
  Matrix Forward(const Matrix& inputs) const;
  Matrix Forward(const Matrix& inputs, Cache& cache) const;
  std::vector<Scalar> Predict(std::span<const float> input) const;
  Gradients Backward(const Cache& cache, const Matrix& output_grad) const;
  void ApplyGradients(const Gradients& grads, Scalar learning_rate);

  std::size_t ParameterCount() const;
  // Layer by layer: weights row-major (out x in), then biases.
  std::vector<Scalar> FlatParameters() const;
  void SetFlatParameters(std::span<const Scalar> params);
  static std::vector<Scalar> Flatten(const Gradients& grads);

  bool AllFinite() const;

  friend bool operator==(const BasicMlp& a, const BasicMlp& b) {
    return a.sizes_ == b.sizes_ && a.FlatParameters() == b.FlatParameters();
  }

 private:
  void CheckInput(const Matrix& inputs) const;

  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

using Mlp = BasicMlp<float>;

// Frozen parameter copy used for TD targets.
template <class Scalar>
struct BasicTargetNetwork {
  BasicMlp<Scalar> net;
  int staleness = 0;  // Q updates since the last refit
  int refits = 0;

  void Refit(const BasicMlp<Scalar>& source) {
    net = source;
    staleness = 0;
    ++refits;
  }
};

using TargetNetwork = BasicTargetNetwork<float>;

struct SgdConfig {
  double learning_rate = 0.1;
  int batch_size = 128;
};

template <class Scalar>
struct BasicQBatch {
  typename BasicMlp<Scalar>::Matrix states;       // encoding x batch
  std::vector<int> actions;
  std::vector<Scalar> rewards;
  typename BasicMlp<Scalar>::Matrix next_states;  // ignored where terminal
  std::vector<game::ActionMask> next_legal;
  std::vector<std::uint8_t> terminal;

  int size() const { return static_cast<int>(actions.size()); }
};

template <class Scalar>
struct BasicPolicyBatch {
  typename BasicMlp<Scalar>::Matrix states;
  std::vector<int> actions;
  std::vector<game::ActionMask> legal;

  int size() const { return static_cast<int>(actions.size()); }
};

using QBatch = BasicQBatch<float>;
using PolicyBatch = BasicPolicyBatch<float>;

// Log-probabilities are clamped below at this value in the NLL.
inline constexpr double kMinLogProbability = -30.0;

// Softmax restricted to legal actions; illegal entries are exactly 0.
template <class Scalar>
std::vector<double> MaskedSoftmax(std::span<const Scalar> logits,
                                  game::ActionMask legal);

// Mean over the batch of (r + max_legal Q'(s', .) - Q(s, a))^2, with the
// max term dropped on terminal transitions. Fills `grads` when non-null.
template <class Scalar>
Scalar QLoss(const BasicMlp<Scalar>& net, const BasicMlp<Scalar>& target,
             const BasicQBatch<Scalar>& batch,
             typename BasicMlp<Scalar>::Gradients* grads);

// Mean over the batch of -log Pi(s, a) under the masked softmax.
template <class Scalar>
Scalar PolicyLoss(const BasicMlp<Scalar>& net, const BasicPolicyBatch<Scalar>& batch,
                  typename BasicMlp<Scalar>::Gradients* grads);

// One SGD step each; return the pre-step loss. Throw NumericalError when the
// loss is not finite. QUpdate advances the target's staleness counter.
template <class Scalar>
Scalar QUpdate(BasicMlp<Scalar>& net, BasicTargetNetwork<Scalar>& target,
               const BasicQBatch<Scalar>& batch, const SgdConfig& config);
template <class Scalar>
Scalar PolicyUpdate(BasicMlp<Scalar>& net, const BasicPolicyBatch<Scalar>& batch,
                    const SgdConfig& config);

// Binary checkpoint: "NFSPMLP1", uint32 layer count n, n uint32 layer sizes,
// then FlatParameters() as float32, all little-endian.
void WriteMlp(std::ostream& os, const Mlp& net);
Mlp ReadMlp(std::istream& is);

}  // namespace nfsp::neural
