#include "polrhet/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "polrhet/errors.hpp"

namespace polrhet {

uint64_t Rng::uniform_below(uint64_t n) {
  if (n == 0) throw DomainError("uniform_below(0)");
  // Rejection sampling to avoid modulo bias.
  uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] so log() never sees zero.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

size_t Rng::categorical(const double* weights, size_t n) {
  if (n == 0) throw DomainError("categorical() with no categories");
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw DomainError("categorical() with negative weight");
    total += weights[i];
  }
  if (total <= 0.0) throw DomainError("categorical() with zero total weight");
  double u = uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return n - 1;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t mix_seed(uint64_t seed, std::string_view label) {
  return mix_seed(seed, fnv1a64(label));
}

uint64_t mix_seed(uint64_t seed, uint64_t k) {
  // splitmix64 finalizer over the combined value.
  uint64_t z = seed ^ (k + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace polrhet
