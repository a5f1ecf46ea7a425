#pragma once
// Deterministic counter-based random streams built on the SplitMix64
// output function.
//
// Every random decision in the simulator is drawn from a stream keyed by
// (seed, purpose tag, a, b).  Streams are derived statelessly, so results
// are independent of thread count and evaluation order; a run is a pure
// function of its seed.

#include <cstdint>

namespace rsim::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  return finalize(z + kGamma);
}

enum class Tag : std::uint64_t {
  kInit = 1,      // initial node placement
  kMove = 2,      // per-slot random-walk steps
  kSchedule = 3,  // per-cell sender/receiver/role draws
  kPairing = 4,   // derangement construction
  kPayload = 5,   // generation payload symbols
  kMeeting = 6,   // walker pairs for meeting statistics
};

constexpr std::uint64_t derive_key(std::uint64_t seed, Tag tag,
                                   std::uint64_t a, std::uint64_t b) noexcept {
  return mix(seed ^ mix(static_cast<std::uint64_t>(tag) ^ mix(a ^ mix(b))));
}

// Sequential generator seeded from a derived key.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : state_(key) {}
  constexpr Stream(std::uint64_t seed, Tag tag, std::uint64_t a,
                   std::uint64_t b) noexcept
      : state_(derive_key(seed, tag, a, b)) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    return finalize(state_);
  }

  // Unbiased draw from [0, n); n >= 1.
  std::uint64_t bounded(std::uint64_t n) noexcept {
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next();
      if (x >= min) return x % n;
    }
  }

  // Uniform double in [0, 1).
  double unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool coin(double p) noexcept { return unit() < p; }

 private:
  std::uint64_t state_;
};

// One draw from {0,1,2,3}; exact since 4 divides 2^64.
constexpr std::uint32_t uniform4(std::uint64_t seed, Tag tag, std::uint64_t a,
                                 std::uint64_t b) noexcept {
  return static_cast<std::uint32_t>(derive_key(seed, tag, a, b) & 3u);
}

}  // namespace rsim::rng
