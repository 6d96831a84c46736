#include "privcomp/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "privcomp/error.hpp"

namespace privcomp {

double EmbeddingVector::norm() const noexcept {
  double sum = 0.0;
  for (const auto& [_, w] : entries) sum += w * w;
  return std::sqrt(sum);
}

double EmbeddingVector::dot(const EmbeddingVector& other) const noexcept {
  double sum = 0.0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TfidfEmbedder::TfidfEmbedder(std::span<const std::string> documents)
    : document_count_(documents.size()) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    auto tokens = tokenize(doc);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  const double n = static_cast<double>(document_count_);
  terms_.reserve(df.size());
  idf_.reserve(df.size());
  for (const auto& [term, count] : df) {
    vocabulary_.emplace(term, static_cast<std::uint32_t>(terms_.size()));
    terms_.push_back(term);
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
}

std::optional<std::uint32_t> TfidfEmbedder::term_index(std::string_view term) const {
  auto it = vocabulary_.find(term);
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

EmbeddingVector TfidfEmbedder::embed(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokenize(text)) {
    if (auto it = vocabulary_.find(token); it != vocabulary_.end()) counts[it->second] += 1.0;
  }
  EmbeddingVector v;
  v.entries.reserve(counts.size());
  for (const auto& [index, count] : counts) v.entries.emplace_back(index, count * idf_[index]);
  const double norm = v.norm();
  if (norm > 0.0) {
    for (auto& [_, w] : v.entries) w /= norm;
  }
  return v;
}

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) noexcept {
  const double na = a.norm();
  const double nb = b.norm();
  double cosine = 0.0;
  if (na > 0.0 && nb > 0.0) cosine = a.dot(b) / (na * nb);
  double score = 1.0 - cosine;
  if (score < 1e-12) score = 0.0;
  return std::min(score, 2.0);
}

Index::Index(std::vector<ChunkRecord> records, std::shared_ptr<const Embedder> embedder)
    : records_(std::move(records)), embedder_(std::move(embedder)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_id_.emplace(records_[i].chunk.chunk_id, i).second) {
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate chunk id '" + records_[i].chunk.chunk_id + "'");
    }
  }
}

const ArticleChunk* Index::find_chunk(std::string_view chunk_id) const {
  auto it = by_id_.find(chunk_id);
  return it == by_id_.end() ? nullptr : &records_[it->second].chunk;
}

std::string Index::dump() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# embedder " << embedder_->identifier() << " dimension " << embedder_->dimension()
      << " chunks " << records_.size() << '\n';
  for (const auto& record : records_) {
    out << record.chunk.chunk_id << '\t' << record.chunk.article_number << '\t';
    bool first = true;
    for (const auto& [index, weight] : record.vector.entries) {
      if (!first) out << ' ';
      out << index << ':' << weight;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

Index build_index(std::vector<ArticleChunk> chunks, std::shared_ptr<const Embedder> embedder) {
  if (chunks.empty()) throw Error(ErrorCode::EmptyCorpus, "no chunks to index");
  if (!embedder) throw Error(ErrorCode::InvalidArgument, "null embedder");
  std::vector<ChunkRecord> records;
  records.reserve(chunks.size());
  for (auto& chunk : chunks) {
    EmbeddingVector v = embedder->embed(chunk.text);
    records.push_back(ChunkRecord{std::move(chunk), std::move(v)});
  }
  return Index(std::move(records), std::move(embedder));
}

Index build_index(std::vector<ArticleChunk> chunks, const RetrieverConfig& config) {
  if (chunks.empty()) throw Error(ErrorCode::EmptyCorpus, "no chunks to index");
  if (config.backend != TfidfEmbedder::kIdentifier) {
    throw Error(ErrorCode::InvalidArgument, "unknown embedder '" + config.backend + "'");
  }
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& chunk : chunks) texts.push_back(chunk.text);
  auto embedder = std::make_shared<const TfidfEmbedder>(texts);
  return build_index(std::move(chunks), std::move(embedder));
}

std::vector<RetrievalHit> retrieve(const Index& index, std::string_view query,
                                   const RetrieverConfig& config) {
  if (!(config.threshold >= 0.0) || !std::isfinite(config.threshold)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be a non-negative finite number");
  }
  const EmbeddingVector q = index.embedder().embed(query);
  std::vector<RetrievalHit> hits;
  for (const auto& record : index.records()) {
    const double score = cosine_distance(q, record.vector);
    if (score <= config.threshold) {
      hits.push_back({record.chunk.chunk_id, record.chunk.article_number, score});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.article_number != b.article_number) return a.article_number < b.article_number;
    return a.chunk_id < b.chunk_id;
  });
  if (config.top_k && hits.size() > *config.top_k) hits.resize(*config.top_k);
  return hits;
}

std::map<int, double> aggregate_articles(std::span<const RetrievalHit> hits) {
  std::map<int, double> best;
  for (const auto& hit : hits) {
    auto [it, inserted] = best.emplace(hit.article_number, hit.score);
    if (!inserted && hit.score < it->second) it->second = hit.score;
  }
  return best;
}

}  // namespace privcomp
