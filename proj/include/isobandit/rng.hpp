#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace isobandit {

/// Disjoint counter ranges per consumer so that, for one seed, function
/// sampling, observation noise and algorithm randomness never share draws.
enum class Stream : std::uint32_t { FunctionSampling = 0, Noise = 1, Algorithm = 2, Harness = 3 };

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
/// counter is (block index, stream, substream). Satisfies
/// UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, Stream stream, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// The raw bijection: ten rounds over `counter` keyed by `key`.
  static Block block(Block counter, Key key);

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  int pos_ = 4;
};

}  // namespace isobandit
