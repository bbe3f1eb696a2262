#include "polrhet/embedding.hpp"

#include <cmath>
#include <string>

#include "polrhet/errors.hpp"

#include "polrhet/rng.hpp"

namespace polrhet {

double dot(const SparseVec& a, const SparseVec& b) {
  const SparseVec& small = a.size() <= b.size() ? a : b;
  const SparseVec& large = a.size() <= b.size() ? b : a;
  double sum = 0.0;
  for (const auto& [i, v] : small) {
    auto it = large.find(i);
    if (it != large.end()) sum += v * it->second;
  }
  return sum;
}

double norm(const SparseVec& a) {
  double ss = 0.0;
  for (const auto& [i, v] : a) ss += v * v;
  return std::sqrt(ss);
}

double cosine(const SparseVec& a, const SparseVec& b, bool* zero_norm) {
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    if (zero_norm) *zero_norm = true;
    return 0.0;
  }
  if (zero_norm) *zero_norm = false;
  return dot(a, b) / (na * nb);
}

SparseVec Embedder::embed_document(const std::vector<std::string>& tokens) const {
  SparseVec sum;
  size_t used = 0;
  for (const auto& tok : tokens) {
    SparseVec v = embed_token(tok);
    if (v.empty()) continue;
    ++used;
    for (const auto& [i, w] : v) sum[i] += w;
  }
  if (used == 0) return {};
  for (auto& [i, w] : sum) w /= double(used);
  double n = norm(sum);
  if (n > 0.0)
    for (auto& [i, w] : sum) w /= n;
  return sum;
}

HashedEmbedder::HashedEmbedder(int dim_bits) : dim_bits_(dim_bits) {
  if (dim_bits < 1 || dim_bits > 30)
    throw ConfigError("embedding dimension bits must lie in [1, 30], got " +
                      std::to_string(dim_bits));
}

SparseVec HashedEmbedder::embed_token(const std::string& token) const {
  uint64_t h = fnv1a64(token);
  int axis = int(h & ((uint64_t(1) << dim_bits_) - 1));
  return {{axis, 1.0}};
}

}  // namespace polrhet
