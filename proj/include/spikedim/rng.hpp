// rng.hpp - counter-based random streams for reproducible Monte Carlo.
//
// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC'11). A stream is fully determined by (seed, stream id): the 64-bit
// seed is the Philox key, the stream id occupies the upper two counter words
// and the lower two words count blocks. Replicate r of a study draws from
// stream id r, so results never depend on which thread ran the replicate.
//
// Normal variates use the Box-Muller transform on two 53-bit uniforms from
// one Philox block; both outputs of a pair are used, cosine branch first.
#pragma once

#include <array>
#include <cstdint>

namespace spikedim {

struct Seed {
  std::uint64_t value = 0;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer, used to derive stream ids from structured indices.
std::uint64_t mix64(std::uint64_t x);

class RandomStream {
 public:
  RandomStream(Seed seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal.
  double normal();

 private:
  void refill();

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spikedim
