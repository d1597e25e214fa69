#pragma once

#include <cstdint>

namespace supplychain {

// Counter-based splittable generator. Every (experiment, repetition, round)
// can be mapped to its own substream, so parallel runs reproduce the exact
// sample streams of a sequential run.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kKeyTweak)) {}

  // Derives an independent stream; the parent is left untouched.
  SplitRng substream(std::uint64_t id) const {
    return SplitRng(mix(key_ + mix(id ^ kStreamTweak)), 0);
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1): 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform index in {0, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    return next_u64() % n;
  }

 private:
  SplitRng(std::uint64_t key, std::uint64_t counter)
      : key_(key), counter_(counter) {}

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kKeyTweak = 0x5851f42d4c957f2dULL;
  static constexpr std::uint64_t kStreamTweak = 0xd1342543de82ef95ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace supplychain
