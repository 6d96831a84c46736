#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcomp/policy.hpp"
#include "privcomp/retrieval.hpp"

namespace privcomp {

inline constexpr std::string_view kComplianceQuestion =
    "Which GDPR article does this privacy policy relate to?";
inline constexpr std::string_view kNoMatchAnswer =
    "No GDPR article matched above the configured threshold.";

struct Prompt {
  std::string question;
  std::string context_text;
  std::string rendered;  // question + '\n' + context_text
};

Prompt build_prompt(const PolicySegment& segment);

struct ArticleScore {
  int article_number = 0;
  double score = 0.0;

  friend bool operator==(const ArticleScore&, const ArticleScore&) = default;
};

// A retrieved chunk handed to the generator.
struct RetrievedPassage {
  std::string chunk_id;
  int article_number = 0;
  double score = 0.0;
  std::string text;
};

/// Turns a prompt plus retrieved passages into answer text. Implementations
/// must throw Error(BackendUnavailable) on failure rather than return
/// placeholder text, and may be called concurrently.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string generate(const Prompt& prompt,
                               std::span<const RetrievedPassage> passages) = 0;
  virtual std::string identifier() const = 0;
  virtual std::chrono::milliseconds timeout() const { return std::chrono::milliseconds{0}; }
};

/// Offline generator: "Related GDPR articles: 5, 21." followed by one line
/// per article with the first sentence of its best passage.
class ExtractiveBackend final : public GeneratorBackend {
 public:
  static constexpr std::string_view kIdentifier = "extractive";

  std::string generate(const Prompt& prompt, std::span<const RetrievedPassage> passages) override;
  std::string identifier() const override { return std::string(kIdentifier); }
};

std::string first_sentence(std::string_view text);

struct GeneratedResponse {
  std::string answer_text;
  // aggregate_articles of the retrieval hits, sorted by (score, article).
  std::vector<ArticleScore> supporting_articles;
  std::string backend_used;
};

std::vector<ArticleScore> rank_articles(std::span<const RetrievalHit> hits);

// Throws BackendUnavailable when the backend fails.
GeneratedResponse answer(const PolicySegment& segment, const Index& index,
                         const RetrieverConfig& config, GeneratorBackend& backend);

struct SegmentResult {
  std::string segment_id;
  std::vector<ArticleScore> articles;
  std::string answer_text;
  std::string backend_used;
  bool fell_back = false;
};

struct BackendFailure {
  std::string provider_id;
  std::string segment_id;
  std::string message;
};

struct ProviderArticles {
  std::set<int> articles;                // union over segments
  std::vector<SegmentResult> segments;   // corpus order
  std::vector<BackendFailure> failures;  // one per failed backend call
};

struct PolicyArticleMap {
  std::map<std::string, ProviderArticles> providers;

  // Moves `other`'s providers in; a provider present in both is replaced.
  void merge(PolicyArticleMap other);
  const SegmentResult* find_segment(std::string_view provider_id,
                                    std::string_view segment_id) const;
  std::size_t failure_count() const noexcept;
};

struct MapOptions {
  // On BackendUnavailable, answer that segment with the extractive backend.
  bool fallback_to_extractive = true;
  // Upper bound on concurrent backend calls.
  std::size_t max_concurrency = 1;
};

/// Answers every segment of `policy`; the provider article set is the union
/// of per-segment supporting articles. Backend failures are recorded in
/// ProviderArticles::failures and never drop a segment. Throws
/// UpstreamEmptyPolicy for a policy without segments.
PolicyArticleMap map_policy_to_articles(const PolicyDocument& policy, const Index& index,
                                        const RetrieverConfig& config, GeneratorBackend& backend,
                                        const MapOptions& options = {});

}  // namespace privcomp
