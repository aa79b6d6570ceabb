#pragma once

#include <cstdint>

#include "swapsim/common.hpp"

namespace swapsim {

/// Counter-based pseudo-random stream with explicit (master_seed, stream_id,
/// counter) state. The k-th draw is a pure function of that triple — integer
/// arithmetic only, so sequences are bit-identical across runs and platforms
/// — and distinct stream_ids give statistically independent streams. That
/// lets every trial of an ensemble own private streams addressed by trial
/// number, making the trial loop order-independent.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(avalanche(avalanche(master_seed + kGolden) ^
                       avalanche(stream_id + 0x6A09E667F3BCC909ULL))) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  /// Next 64 uniform bits.
  std::uint64_t next_u64() {
    ++counter_;
    return avalanche(key_ + counter_ * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), exactly unbiased via rejection of the
  /// partial range at the top of the 64-bit space.
  std::uint64_t next_index(std::uint64_t bound) {
    require(bound >= 1, "RngStream::next_index: bound must be positive");
    const std::uint64_t min_accept = (0ULL - bound) % bound;  // (2^64 - bound) mod bound
    std::uint64_t draw = next_u64();
    while (draw < min_accept) draw = next_u64();
    return draw % bound;
  }

  bool operator==(const RngStream& other) const = default;

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  /// 64-bit avalanche finalizer: every input bit affects every output bit.
  static std::uint64_t avalanche(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Independent reproducible stream for (master_seed, stream_id).
inline RngStream rng_derive(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

}  // namespace swapsim
