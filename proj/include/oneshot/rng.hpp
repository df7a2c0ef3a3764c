#pragma once
// Counter-mode seeded randomness. Every consumer addresses an independent
// stream by (seed, stream ids); trials regenerate identical values no matter
// how work is split across threads.

#include <cstdint>

namespace oneshot {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A stream is keyed by up to three ids; `next()` walks a counter.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t id0 = 0, uint64_t id1 = 0, uint64_t id2 = 0) {
    state_ = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    state_ = splitmix64(state_ ^ splitmix64(id0 ^ 0x13198a2e03707344ULL));
    state_ = splitmix64(state_ ^ splitmix64(id1 ^ 0xa4093822299f31d0ULL));
    state_ = splitmix64(state_ ^ splitmix64(id2 ^ 0x082efa98ec4e6c89ULL));
  }

  uint64_t next() { return splitmix64(state_ + (counter_++) * 0x9e3779b97f4a7c15ULL); }

  // Unbiased uniform over [0, n) by rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t bound = n * (UINT64_MAX / n);
    for (;;) {
      uint64_t u = next();
      if (u < bound) return u % n;
    }
  }

  double unit() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
  uint64_t counter_ = 0;
};

}  // namespace oneshot
