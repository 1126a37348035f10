#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace oodcp {

// Identity string recorded in simulation output metadata.
inline constexpr const char* kGeneratorId = "philox4x32-10";

// Philox 4x32 block cipher with 10 rounds: maps a 128-bit counter under a
// 64-bit key to 128 pseudo-random bits. Counter-based, so any block of the
// stream is addressable directly; streams never overlap across keys or
// counter prefixes.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);
};

// One logical random stream: key = experiment seed, counter words 2..3 =
// stream id, counter words 0..1 = running block index. Distinct stream ids
// under the same seed give statistically independent sequences, which is how
// trials obtain private generators.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  // Uniform on (0, 1]; safe as a log argument.
  double uniform_positive();

  // Standard normal via the Box-Muller pair, second value cached. Avoids
  // library distribution objects so sequences are reproducible across
  // standard libraries.
  double normal();

  // Index i with probability weights[i] / sum(weights). Weights must be
  // nonnegative with a positive sum.
  std::size_t categorical(std::span<const double> weights);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;  // empty
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace oodcp
