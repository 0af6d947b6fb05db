#pragma once

#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace fishpath::rng {

/// Stream identifiers. Every random draw in the library comes from
/// (seed, stream, index, counter); there is no global generator state.
enum class Stream : std::uint64_t {
  paths = 1,
  field = 2,
  generator = 3,
  growth_check = 4,
  feynman_kac = 5,
  verification = 6,
};

std::uint64_t mix64(std::uint64_t z);

/// Key for the counter-based stream (seed, stream, index).
std::uint64_t derive_key(std::uint64_t seed, Stream stream, std::uint64_t index);

/// SplitMix64 evaluated at key + counter * golden gamma. Satisfies
/// UniformRandomBitGenerator; construction is O(1) so one engine per path is
/// cheap.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  explicit CounterEngine(std::uint64_t key) : key_(key) {}
  CounterEngine(std::uint64_t seed, Stream stream, std::uint64_t index)
      : key_(derive_key(seed, stream, index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal draws (ziggurat) from one counter-based stream.
class NormalSource {
 public:
  NormalSource(std::uint64_t seed, Stream stream, std::uint64_t index)
      : engine_(seed, stream, index) {}

  double operator()() { return dist_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  CounterEngine engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fishpath::rng
