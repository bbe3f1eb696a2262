#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace polrhet {

// Deterministic random source.  Every random choice in the library flows
// through an explicit seed, and the uniform/normal transforms are implemented
// here (rather than with std:: distributions) so that generated sequences are
// identical across standard-library implementations and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer on [0, n); n must be positive.
  uint64_t uniform_below(uint64_t n);

  // Standard normal via Box-Muller; caches the spare deviate.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Bernoulli(p).
  bool bernoulli(double p) { return uniform() < p; }

  // Draws an index from unnormalized non-negative weights.
  size_t categorical(const double* weights, size_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a 64-bit hash; used for sub-seed derivation and hashed token features.
uint64_t fnv1a64(std::string_view s);

// Derives an independent stream seed from a root seed and a label, so that
// separate pipeline stages can share one user-facing seed without coupling
// their draw sequences.
uint64_t mix_seed(uint64_t seed, std::string_view label);
uint64_t mix_seed(uint64_t seed, uint64_t k);

}  // namespace polrhet
