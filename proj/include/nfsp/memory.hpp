#pragma once

// Replay memories: a circular buffer for M_RL, Vitter's algorithm R reservoir
// for M_SL and a reservoir variant with a floor on the admission probability.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nfsp/game.hpp"

namespace nfsp::memory {

class EmptyMemoryError : public std::logic_error {
 public:
  EmptyMemoryError() : std::logic_error("cannot sample from an empty memory") {}
};

// Own-perspective transition. Rewards are 0 except on the terminal step.
struct Transition {
  game::EncodingBits state{};
  game::EncodingBits next_state{};  // all zero when terminal
  float reward = 0.0f;
  std::uint8_t action = 0;
  game::ActionMask legal;
  game::ActionMask next_legal;  // empty when terminal
  bool terminal = false;
};

struct BehaviourTuple {
  game::EncodingBits state{};
  std::uint8_t action = 0;
  game::ActionMask legal;
};

namespace internal {

template <class T, class Rng>
std::vector<T> SampleUniform(const std::vector<T>& items, std::size_t k, Rng& rng) {
  if (items.empty()) throw EmptyMemoryError();
  std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(items[pick(rng)]);
  return out;
}

inline void CheckCapacity(std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("memory capacity must be positive");
}

}  // namespace internal

template <class T>
class CircularBuffer {
 public:
  explicit CircularBuffer(std::size_t capacity) : capacity_(capacity) {
    internal::CheckCapacity(capacity);
  }

  void Push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[cursor_] = std::move(item);
    }
    cursor_ = (cursor_ + 1) % capacity_;
    ++seen_;
  }

  // Oldest first.
  const T& At(std::size_t i) const {
    return items_.size() < capacity_ ? items_[i] : items_[(cursor_ + i) % capacity_];
  }
  std::vector<T> Contents() const {
    std::vector<T> out;
    for (std::size_t i = 0; i < items_.size(); ++i) out.push_back(At(i));
    return out;
  }

  // Uniform with replacement.
  template <class Rng>
  std::vector<T> Sample(std::size_t k, Rng& rng) const {
    return internal::SampleUniform(items_, k, rng);
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t seen() const { return seen_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::uint64_t seen_ = 0;
  std::vector<T> items_;
};

// Once full, the n-th item is admitted with probability
// max(capacity / n, min_probability) and overwrites a uniform slot.
// min_probability = 0 is algorithm R.
template <class T>
class ExpReservoir {
 public:
  ExpReservoir(std::size_t capacity, double min_probability, std::uint64_t seed)
      : capacity_(capacity), min_probability_(min_probability), rng_(seed) {
    internal::CheckCapacity(capacity);
    if (!(min_probability >= 0 && min_probability <= 1)) {
      throw std::invalid_argument("minimum replacement probability must lie in [0, 1]");
    }
  }

  void Push(T item) {
    ++seen_;
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
      return;
    }
    const double p = std::max(static_cast<double>(capacity_) / static_cast<double>(seen_),
                              min_probability_);
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p) {
      items_[std::uniform_int_distribution<std::size_t>(0, capacity_ - 1)(rng_)] =
          std::move(item);
    }
  }

  template <class Rng>
  std::vector<T> Sample(std::size_t k, Rng& rng) const {
    return internal::SampleUniform(items_, k, rng);
  }

  const std::vector<T>& Contents() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t seen() const { return seen_; }
  double min_probability() const { return min_probability_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  double min_probability_;
  std::uint64_t seen_ = 0;
  game::Rng rng_;
  std::vector<T> items_;
};

// Uniform reservoir, Vitter's algorithm R: the n-th item replaces slot j for
// j uniform in [0, n) whenever j < capacity.
template <class T>
class Reservoir {
 public:
  Reservoir(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
    internal::CheckCapacity(capacity);
  }

  void Push(T item) {
    ++seen_;
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
      return;
    }
    const std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(0, seen_ - 1)(rng_);
    if (j < capacity_) items_[j] = std::move(item);
  }

  template <class Rng>
  std::vector<T> Sample(std::size_t k, Rng& rng) const {
    return internal::SampleUniform(items_, k, rng);
  }

  const std::vector<T>& Contents() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t seen() const { return seen_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::uint64_t seen_ = 0;
  game::Rng rng_;
  std::vector<T> items_;
};

enum class MemoryKind { kCircular, kReservoir, kExponential };

MemoryKind ParseMemoryKind(const std::string& name);
std::string MemoryKindName(MemoryKind kind);

// Runtime choice between the three structures.
template <class T>
class ReplayMemory {
 public:
  ReplayMemory(MemoryKind kind, std::size_t capacity, double min_probability,
               std::uint64_t seed)
      : kind_(kind), impl_(Make(kind, capacity, min_probability, seed)) {}

  void Push(T item) {
    std::visit([&](auto& m) { m.Push(std::move(item)); }, impl_);
  }
  template <class Rng>
  std::vector<T> Sample(std::size_t k, Rng& rng) const {
    return std::visit([&](const auto& m) { return m.Sample(k, rng); }, impl_);
  }
  std::vector<T> Contents() const {
    return std::visit(
        [](const auto& m) { return std::vector<T>(m.Contents()); }, impl_);
  }
  std::size_t size() const {
    return std::visit([](const auto& m) { return m.size(); }, impl_);
  }
  std::size_t capacity() const {
    return std::visit([](const auto& m) { return m.capacity(); }, impl_);
  }
  std::uint64_t seen() const {
    return std::visit([](const auto& m) { return m.seen(); }, impl_);
  }
  bool empty() const { return size() == 0; }
  MemoryKind kind() const { return kind_; }

 private:
  using Impl = std::variant<CircularBuffer<T>, Reservoir<T>, ExpReservoir<T>>;

  static Impl Make(MemoryKind kind, std::size_t capacity, double min_probability,
                   std::uint64_t seed) {
    switch (kind) {
      case MemoryKind::kCircular:
        return CircularBuffer<T>(capacity);
      case MemoryKind::kReservoir:
        return Reservoir<T>(capacity, seed);
      case MemoryKind::kExponential:
        return ExpReservoir<T>(capacity, min_probability, seed);
    }
    throw std::invalid_argument("unknown memory kind");
  }

  MemoryKind kind_;
  Impl impl_;
};

inline MemoryKind ParseMemoryKind(const std::string& name) {
  if (name == "circular" || name == "sliding") return MemoryKind::kCircular;
  if (name == "reservoir") return MemoryKind::kReservoir;
  if (name == "exponential") return MemoryKind::kExponential;
  throw std::invalid_argument("unknown memory kind '" + name +
                              "' (expected circular, reservoir or exponential)");
}

inline std::string MemoryKindName(MemoryKind kind) {
  switch (kind) {
    case MemoryKind::kCircular:
      return "circular";
    case MemoryKind::kReservoir:
      return "reservoir";
    case MemoryKind::kExponential:
      return "exponential";
  }
  return "?";
}

}  // namespace nfsp::memory
