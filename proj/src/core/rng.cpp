#include "core/rng.hpp"

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace evk {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
  std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
  ctr[0] = out0;
  ctr[1] = lo1;
  ctr[2] = out2;
  ctr[3] = lo0;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  key_[0] = static_cast<std::uint32_t>(seed);
  key_[1] = static_cast<std::uint32_t>(seed >> 32);
  counter_[0] = 0;
  counter_[1] = 0;
  counter_[2] = static_cast<std::uint32_t>(stream);
  counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

void Rng::refill() {
  std::uint32_t ctr[4] = {counter_[0], counter_[1], counter_[2], counter_[3]};
  std::uint32_t key[2] = {key_[0], key_[1]};
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  block_[0] = ctr[0];
  block_[1] = ctr[1];
  block_[2] = ctr[2];
  block_[3] = ctr[3];
  have_ = 4;
  // 64-bit block index in counter words 0..1; words 2..3 hold the stream id.
  if (++counter_[0] == 0) ++counter_[1];
}

std::uint64_t Rng::next_u64() {
  if (have_ < 2) refill();
  const std::uint64_t lo = block_[4 - have_];
  const std::uint64_t hi = block_[4 - have_ + 1];
  have_ -= 2;
  return (hi << 32) | lo;
}

double Rng::next_u01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_u01_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::next_normal() { return norm_quantile(next_u01_open()); }

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "next_below: n must be positive");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the xor of the two inputs.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace evk
