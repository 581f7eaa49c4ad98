#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace i2a {

/// Maps instruction text to a fixed-dimension unit vector. Implementations
/// must be deterministic: identical text yields identical vectors.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd embed(const std::string& text) const = 0;
};

// Salts for the signed feature hashing scheme. Fixed constants so embeddings
// (and therefore trained checkpoints) are reproducible everywhere.
inline constexpr std::uint64_t kEmbedBucketSalt = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kEmbedSignSalt = 0xC2B2AE3D27D4EB4FULL;

/// Offline embedder: word unigrams and bigrams hashed into d signed buckets,
/// then L2-normalized. No vocabulary, no training, no file access.
class HashedNgramEmbedder final : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(int dim = 1024);
  int dim() const override { return dim_; }
  Eigen::VectorXd embed(const std::string& text) const override;

 private:
  int dim_;
};

/// Serves precomputed vectors keyed by the FNV-1a hash of the normalized
/// instruction. File layout (little-endian): magic "I2AEMBED", u32 version,
/// u32 dim, u64 count, then count records of { u64 key, dim x f64 }.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(const std::string& path);
  int dim() const override { return dim_; }
  Eigen::VectorXd embed(const std::string& text) const override;

 private:
  int dim_ = 0;
  std::unordered_map<std::uint64_t, Eigen::VectorXd> vectors_;
};

/// Writes the FileEmbeddingProvider layout for the given (text, vector) pairs.
void write_embedding_file(
    const std::string& path,
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& entries);

/// L copies of the embedding stacked as rows (the network's input layout).
Eigen::MatrixXd tile_embedding(const Eigen::VectorXd& e, int length);

}  // namespace i2a
