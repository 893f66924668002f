#pragma once

#include <cmath>
#include <cstdint>

namespace neurobeat {

// SplitMix64. Every stochastic component in the project (weight init, epoch
// shuffles, synthetic data, permutation tests) draws from this generator so
// that runs are reproducible from a single u64 seed across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Unbiased integer in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller. Consumes two draws per pair; the spare
  // is cached so consecutive calls stay cheap.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  uint64_t state_;
  bool has_spare_{false};
  double spare_{0.0};
};

// One-shot mix, used to derive independent child seeds (e.g. per fold,
// per subject, per song) from a master seed.
inline uint64_t mix_seed(uint64_t seed) { return SplitMix64(seed).next_u64(); }

inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  return mix_seed(master ^ index);
}

}  // namespace neurobeat
