#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "privcomp/regulation.hpp"

namespace privcomp {

// Sparse vector: (dimension index, weight) pairs sorted by index, zero
// weights omitted.
struct EmbeddingVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool is_zero() const noexcept { return entries.empty(); }
  double norm() const noexcept;
  double dot(const EmbeddingVector& other) const noexcept;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// Lowercased maximal runs of ASCII letters and digits.
std::vector<std::string> tokenize(std::string_view text);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::string identifier() const = 0;
  virtual std::size_t dimension() const = 0;
};

/// TF-IDF over the vocabulary of the fitted corpus. Weight of term t in a
/// text is count(t) * (ln((1 + N) / (1 + df(t))) + 1), and the vector is
/// L2-normalised. Terms are numbered in lexicographic order, so the
/// embedding does not depend on corpus order.
class TfidfEmbedder final : public Embedder {
 public:
  static constexpr std::string_view kIdentifier = "tfidf";

  explicit TfidfEmbedder(std::span<const std::string> documents);

  EmbeddingVector embed(std::string_view text) const override;
  std::string identifier() const override { return std::string(kIdentifier); }
  std::size_t dimension() const override { return idf_.size(); }

  std::size_t document_count() const noexcept { return document_count_; }
  std::optional<std::uint32_t> term_index(std::string_view term) const;
  double idf(std::uint32_t term) const { return idf_.at(term); }
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }

 private:
  std::map<std::string, std::uint32_t, std::less<>> vocabulary_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::size_t document_count_ = 0;
};

struct ChunkRecord {
  ArticleChunk chunk;
  EmbeddingVector vector;
};

struct RetrievalHit {
  std::string chunk_id;
  int article_number = 0;
  double score = 0.0;  // cosine distance, lower is closer

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

struct RetrieverConfig {
  double threshold = 1.0;
  std::optional<std::size_t> top_k;
  std::string backend = std::string(TfidfEmbedder::kIdentifier);
};

// Cosine distance 1 - cos(a, b), clamped to [0, 2]; a zero vector is
// orthogonal to everything (distance 1). Distances within 1e-12 of zero
// are reported as exactly zero.
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) noexcept;

/// Immutable vector index over regulation chunks. Safe for concurrent
/// retrieve() calls once built.
class Index {
 public:
  Index(std::vector<ChunkRecord> records, std::shared_ptr<const Embedder> embedder);

  const std::vector<ChunkRecord>& records() const noexcept { return records_; }
  const Embedder& embedder() const noexcept { return *embedder_; }
  const ArticleChunk* find_chunk(std::string_view chunk_id) const;

  // Debug dump: one line per chunk with its sparse vector. Not a stable format.
  std::string dump() const;

 private:
  std::vector<ChunkRecord> records_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::shared_ptr<const Embedder> embedder_;
};

// Fits the embedder named by config.backend on the chunks. Throws
// EmptyCorpus for no chunks and InvalidArgument for duplicate chunk ids or an
// unknown backend.
Index build_index(std::vector<ArticleChunk> chunks, const RetrieverConfig& config);
// Uses a caller-supplied embedder (an external embedding service, say).
Index build_index(std::vector<ArticleChunk> chunks, std::shared_ptr<const Embedder> embedder);

/// Hits with score <= config.threshold, sorted by (score, article_number,
/// chunk_id) and cut to top_k when set.
std::vector<RetrievalHit> retrieve(const Index& index, std::string_view query,
                                   const RetrieverConfig& config);

// Best (minimum) score per article.
std::map<int, double> aggregate_articles(std::span<const RetrievalHit> hits);

}  // namespace privcomp
