#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace strategic {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// FNV-1a hash of a stream label, used to name RNG streams.
std::uint64_t label_hash(std::string_view label);

/// Sub-seed for (master seed, index, label). Every replication, forked
/// environment and algorithm-internal stream gets its seed from here:
///   mix64(mix64(master ^ mix64(label_hash(label))) + index * 0x9E3779B97F4A7C15)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label);

/// Counter-based generator: the i-th output is mix64(key + i * golden_gamma).
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : key_(mix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Independent stream derived from this generator's key (not its position).
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace strategic
