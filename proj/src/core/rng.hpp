#pragma once

#include <cstdint>

namespace tailnest {

// Counter-based generator. The state never mutates beyond a counter, so a
// stream is a pure function of (seed, stream, counter); samplers key one
// stream per sample to make output independent of worker partitioning.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed + kGolden) + stream)) {}

  std::uint64_t next() { return mix64(key_ + kGolden * ++ctr_); }

  // uniform in [0, 1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace tailnest
