#pragma once

#include <Eigen/Core>

#include <chrono>
#include <string>
#include <string_view>
#include <utility>

namespace pomp {

struct EmbeddingPair {
  Eigen::VectorXd source;
  Eigen::VectorXd aux;
};

// Sentence encoder contract. Pairs are encoded together, mirroring how the
// encoder is applied to each (source, auxiliary) pair.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingPair encode(std::string_view source, std::string_view aux) = 0;
};

template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) return 0.0;
  return a.dot(b) / denom;
}

// Same vector for every string: cosine 1 everywhere.
class IdenticalEmbedder final : public EmbeddingProvider {
 public:
  explicit IdenticalEmbedder(int dim = 8) : dim_(dim) {}
  EmbeddingPair encode(std::string_view, std::string_view) override;

 private:
  int dim_;
};

// Returns a pair of unit vectors whose cosine is exactly `similarity`.
class FixedSimilarityEmbedder final : public EmbeddingProvider {
 public:
  explicit FixedSimilarityEmbedder(double similarity);
  EmbeddingPair encode(std::string_view, std::string_view) override;

 private:
  double similarity_;
};

// Bag of hashed character trigrams; a cheap lexical stand-in for a neural
// encoder. Deterministic.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(int dim = 256) : dim_(dim) {}
  EmbeddingPair encode(std::string_view source, std::string_view aux) override;
  Eigen::VectorXd embed(std::string_view text) const;

 private:
  int dim_;
};

// POST {"texts": [source, aux]} -> {"embeddings": [[...], [...]]}.
struct HttpEmbedderConfig {
  std::string url;  // scheme://host[:port]/path
  std::chrono::milliseconds timeout{30000};
};

class HttpEmbedder final : public EmbeddingProvider {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {}
  EmbeddingPair encode(std::string_view source, std::string_view aux) override;

 private:
  HttpEmbedderConfig config_;
};

}  // namespace pomp
