#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "hdd/common.hpp"

namespace hdd {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Counter-based stream: every draw is a pure function of (key, counter), and the
// key is a pure function of (seed, ids). Entities keyed by id therefore get the
// same values no matter in which order they are generated, and results are
// identical across platforms.
class RngStream {
 public:
  explicit RngStream(uint64_t key) : key_(key) {}

  static RngStream keyed(uint64_t seed, std::initializer_list<uint64_t> ids) {
    uint64_t k = splitmix64(seed ^ 0x5851F42D4C957F2Dull);
    for (uint64_t v : ids) k = splitmix64(k ^ splitmix64(v));
    return RngStream(k);
  }

  static RngStream keyed(uint64_t seed, const std::string& tag, uint64_t a = 0, uint64_t b = 0) {
    return keyed(seed, {fnv1a64(tag), a, b});
  }

  uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(++counter_)); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound); bound must be > 0.
  uint64_t next_below(uint64_t bound) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * bound) >> 64);
  }

  // Uniform in [lo, hi] inclusive.
  int64_t next_in(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Uniform in [-scale, scale).
  double next_symmetric(double scale) { return (next_double() * 2.0 - 1.0) * scale; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next_below(i)]);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace hdd
