#pragma once

#include <map>
#include <string>
#include <vector>

namespace polrhet {

// Sparse embedding vector: dimension index -> weight.
using SparseVec = std::map<int, double>;

double dot(const SparseVec& a, const SparseVec& b);
double norm(const SparseVec& a);
// Cosine similarity; zero when either vector has zero norm (flagged if asked).
double cosine(const SparseVec& a, const SparseVec& b, bool* zero_norm = nullptr);

// Maps a token sequence to a vector.  Implementations must be deterministic.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual SparseVec embed_token(const std::string& token) const = 0;

  // Document embedding: L2-normalized mean of token embeddings (the zero
  // vector when no token embeds to anything).
  SparseVec embed_document(const std::vector<std::string>& tokens) const;
};

// Default embedder: hashed bag-of-tokens.  Each token maps to a single axis
// chosen by a stable 64-bit hash; document vectors are therefore normalized
// hashed token counts.  Self-contained stand-in for a pretrained embedding
// with the same interface and determinism guarantees.
class HashedEmbedder : public Embedder {
 public:
  explicit HashedEmbedder(int dim_bits = 14);
  SparseVec embed_token(const std::string& token) const override;
  int dimension() const { return 1 << dim_bits_; }

 private:
  int dim_bits_;
};

}  // namespace polrhet
