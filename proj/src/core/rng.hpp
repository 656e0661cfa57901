#pragma once

#include <cstdint>
#include <vector>

namespace evk {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).  A (seed,
// stream) pair names an independent substream, so replication b of a
// resampling procedure can draw from Rng(seed, b) regardless of which worker
// thread executes it — results are identical for any thread count.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double next_u01();

  // Uniform on the open interval (0,1); safe to feed into norm_quantile.
  double next_u01_open();

  // Standard normal via inverse-CDF transform.
  double next_normal();

  // Uniform integer in [0, n); n must be positive.  Fixed-point
  // multiply-shift; bias is below 2^-64 and identical across platforms.
  std::uint64_t next_below(std::uint64_t n);

  // Fisher-Yates shuffle of the first `prefix` positions (or all when
  // prefix >= size); used for sampling without replacement.
  template <typename T>
  void partial_shuffle(std::vector<T>& v, std::size_t prefix) {
    const std::size_t n = v.size();
    if (n < 2) return;
    const std::size_t last = prefix >= n ? n - 1 : prefix;
    for (std::size_t i = 0; i < last; ++i) {
      std::size_t j = i + static_cast<std::size_t>(
                              next_below(static_cast<std::uint64_t>(n - i)));
      if (i != j) std::swap(v[i], v[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    partial_shuffle(v, v.size());
  }

  // Stateless mix of (seed, salt) into a fresh 64-bit seed; used to derive
  // per-trial bootstrap seeds in the simulation harness.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt);

private:
  void refill();

  std::uint32_t key_[2];
  std::uint32_t counter_[4];
  std::uint32_t block_[4];
  int have_ = 0;  // unread 32-bit words left in block_
};

}  // namespace evk
