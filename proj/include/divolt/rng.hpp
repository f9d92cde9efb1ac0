#pragma once

#include <cstdint>

// Counter-based RNG (Philox4x32-10). Streams are cheap to derive and
// independent by construction, so replications and resamples can be handed
// their own stream and produce identical output no matter how work is split
// across threads.

namespace divolt {

// splitmix64 finalizer; bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// Derive a child stream id from a base id and an index.
std::uint64_t substream(std::uint64_t base, std::uint64_t id);

// One Philox4x32-10 block: counter word layout
// {low32(counter), high32(counter), low32(stream), high32(stream)},
// key layout {low32(key), high32(key)}.
void philox4x32_block(std::uint64_t key, std::uint64_t stream,
                      std::uint64_t counter, std::uint32_t out[4]);

class Rng {
 public:
  Rng(std::uint64_t key, std::uint64_t stream)
      : key_(key), stream_(stream) {}

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0,1) with 53-bit resolution.
  double next_uniform();

  // Standard normal via inverse CDF; consumes exactly one uniform.
  double next_normal();

 private:
  void refill();

  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int pos_ = 4;
};

}  // namespace divolt
