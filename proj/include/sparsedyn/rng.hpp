#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sparsedyn {

// splitmix64 finalizer. Used for seeding the main generator and for deriving
// child seeds; the exact constants are part of the reproducibility contract
// and must not change between releases.
inline std::uint64_t seed_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child-seed derivation: combine(root, salt) folds one salt word
// into a seed. Chained calls derive per-trial / per-noise-draw streams that are
// stable across platforms, thread counts and releases.
inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t salt) {
  return seed_mix(seed ^ (seed_mix(salt) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return seed_combine(seed_combine(seed, a), b);
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
  return seed_combine(seed_combine(seed, a, b), c);
}

// xoshiro256++ 1.0 seeded through splitmix64. Self-contained so that streams
// are identical on every platform; the standard library distributions are
// deliberately not used anywhere (their output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : s_) {
      s += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal via Box-Muller; generates pairs, caches the second value
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Bit pattern of a double, for folding real-valued grid points (e.g. an SNR
// level) into a seed without rounding ambiguity.
inline std::uint64_t seed_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace sparsedyn
