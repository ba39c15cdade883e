#pragma once

#include <cstdint>

namespace tilebn {

// SplitMix64 (Steele, Lea, Flood 2014). Used to expand a 64-bit seed into
// generator state and to derive substream seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

// xoshiro256++ 1.0 (Blackman, Vigna 2019), seeded through SplitMix64.
// All randomness in this project flows through this generator so that every
// sampled artifact is reproducible from a single 64-bit seed.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed);

  uint64_t next();

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n), rejection sampled. n must be > 0.
  uint64_t bounded(uint64_t n);

 private:
  uint64_t state_[4];
};

// Deterministic seed for a named substream of `base`. Streams keep the
// per-patient seed spaces of cohort sampling, detector simulation and fold
// shuffling from colliding while everything still derives from one seed.
uint64_t substream_seed(uint64_t base, uint64_t stream);

inline constexpr uint64_t kStreamDetections = 1;
inline constexpr uint64_t kStreamFolds = 2;

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (Lentz). a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

// Quantile of Beta(a, b) at probability u, computed by bisection on
// regularized_incomplete_beta. Fixed iteration count keeps the result a
// pure function of its inputs.
double beta_quantile(double a, double b, double u);

// Inverse-CDF beta draw on one uniform from `rng`.
double sample_beta(Xoshiro256pp& rng, double a, double b);

}  // namespace tilebn
