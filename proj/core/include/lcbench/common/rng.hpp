#pragma once

#include <cmath>
#include <cstdint>

namespace lcbench::common {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream k derived from a master seed; used for per-episode environments.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  return splitmix64(master ^ splitmix64(k + 1));
}

// Deterministic generator with explicit draw semantics. std:: distributions
// are implementation-defined, so uniform/normal are spelled out here; every
// normal() consumes exactly two uniforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(splitmix64(seed)) {
    if (s_ == 0) s_ = 0xD1B54A32D192ED03ull;
  }

  std::uint64_t next_u64() {
    // xorshift64* keeps the state a single word, handy for snapshots
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545F4914F6CDD1Dull;
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal via Box-Muller
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  std::uint64_t state() const { return s_; }

 private:
  std::uint64_t s_;
};

}  // namespace lcbench::common
