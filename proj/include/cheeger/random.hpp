#pragma once

#include <cstdint>

#include "cheeger/linalg.hpp"

namespace cheeger {

// Counter-based generator: draw n of stream s under seed k is
// splitmix64(k, s, n). Each consumer owns a stream id, so adding draws in one
// place never shifts the values seen by another.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal (Box-Muller, no cached second value).
  double normal();
  // Uniform on the Euclidean unit sphere in R^n.
  Vector unit_vector(Eigen::Index n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Stream ids used by the verification harness.
namespace streams {
inline constexpr std::uint64_t kGroupElements = 1;
inline constexpr std::uint64_t kDirections = 2;
inline constexpr std::uint64_t kOracleSamples = 3;
inline constexpr std::uint64_t kInvarianceVectors = 4;
}  // namespace streams

std::uint64_t splitmix64(std::uint64_t x);

// Radical inverse of `index` in the given prime base (Halton coordinate).
double radical_inverse(std::uint64_t index, unsigned base);

}  // namespace cheeger
