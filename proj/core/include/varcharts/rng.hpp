#pragma once

#include <cmath>
#include <cstdint>

namespace varcharts {

// Deterministic random source with substreams.  Replication r of a study uses
// the substream (seed, r); the mapping from (seed, stream) to generator state
// goes through an avalanche mix so nearby stream ids give unrelated streams.
// Engine: xoshiro256++ seeded from SplitMix64.  Normal variates: Box-Muller.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

  void reseed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = mix64(seed, stream);
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = avalanche(x);
    }
    state_[0] |= 1;  // xoshiro forbids the all-zero state
    has_spare_ = false;
    spare_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform draw in (0, 1]; never returns 0, so log() is always finite.
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller; exact, not tail-truncated).
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = avalanche(a + 0x9e3779b97f4a7c15ULL);
    h ^= avalanche(b + 0xbf58476d1ce4e5b9ULL) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return avalanche(h);
  }

  std::uint64_t state_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace varcharts
