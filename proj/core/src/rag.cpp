#include "privcomp/rag.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <sstream>

#include "privcomp/error.hpp"
#include "text_util.hpp"

namespace privcomp {

Prompt build_prompt(const PolicySegment& segment) {
  Prompt prompt;
  prompt.question = std::string(kComplianceQuestion);
  prompt.context_text = segment.text;
  prompt.rendered = prompt.question + "\n" + prompt.context_text;
  return prompt;
}

std::string first_sentence(std::string_view text) {
  text = detail::trim(text);
  std::size_t end = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n' ||
         text[i + 1] == '\t')) {
      end = i + 1;
      break;
    }
  }
  std::string out;
  out.reserve(end);
  bool space = false;
  for (char c : text.substr(0, end)) {
    if (c == '\n' || c == '\t' || c == ' ' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string ExtractiveBackend::generate(const Prompt&,
                                        std::span<const RetrievedPassage> passages) {
  if (passages.empty()) return std::string(kNoMatchAnswer);
  // Passages arrive sorted by score, so the first passage per article is its
  // best one.
  std::vector<int> order;
  std::map<int, const RetrievedPassage*> best;
  for (const auto& p : passages) {
    if (best.emplace(p.article_number, &p).second) order.push_back(p.article_number);
  }
  std::ostringstream out;
  out << "Related GDPR articles: ";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) out << ", ";
    out << order[i];
  }
  out << '.';
  for (int article : order) {
    out << "\nArticle " << article << ": " << first_sentence(best[article]->text);
  }
  return out.str();
}

std::vector<ArticleScore> rank_articles(std::span<const RetrievalHit> hits) {
  std::vector<ArticleScore> out;
  for (const auto& [article, score] : aggregate_articles(hits)) out.push_back({article, score});
  std::sort(out.begin(), out.end(), [](const ArticleScore& a, const ArticleScore& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.article_number < b.article_number;
  });
  return out;
}

namespace {

std::vector<RetrievedPassage> passages_for(const Index& index,
                                           const std::vector<RetrievalHit>& hits) {
  std::vector<RetrievedPassage> out;
  out.reserve(hits.size());
  for (const auto& hit : hits) {
    const ArticleChunk* chunk = index.find_chunk(hit.chunk_id);
    out.push_back({hit.chunk_id, hit.article_number, hit.score, chunk ? chunk->text : ""});
  }
  return out;
}

}  // namespace

GeneratedResponse answer(const PolicySegment& segment, const Index& index,
                         const RetrieverConfig& config, GeneratorBackend& backend) {
  const Prompt prompt = build_prompt(segment);
  const auto hits = retrieve(index, segment.text, config);
  GeneratedResponse response;
  response.supporting_articles = rank_articles(hits);
  const auto passages = passages_for(index, hits);
  response.answer_text = backend.generate(prompt, passages);
  response.backend_used = backend.identifier();
  return response;
}

void PolicyArticleMap::merge(PolicyArticleMap other) {
  for (auto& [id, provider] : other.providers) providers[id] = std::move(provider);
}

const SegmentResult* PolicyArticleMap::find_segment(std::string_view provider_id,
                                                    std::string_view segment_id) const {
  auto it = providers.find(std::string(provider_id));
  if (it == providers.end()) return nullptr;
  for (const auto& seg : it->second.segments) {
    if (seg.segment_id == segment_id) return &seg;
  }
  return nullptr;
}

std::size_t PolicyArticleMap::failure_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, p] : providers) n += p.failures.size();
  return n;
}

namespace {

struct SegmentOutcome {
  SegmentResult result;
  std::optional<BackendFailure> failure;
};

SegmentOutcome answer_segment(const std::string& provider_id, const PolicySegment& segment,
                              const Index& index, const RetrieverConfig& config,
                              GeneratorBackend& backend, const MapOptions& options) {
  SegmentOutcome outcome;
  outcome.result.segment_id = segment.segment_id;
  const Prompt prompt = build_prompt(segment);
  const auto hits = retrieve(index, segment.text, config);
  outcome.result.articles = rank_articles(hits);
  const auto passages = passages_for(index, hits);
  try {
    outcome.result.answer_text = backend.generate(prompt, passages);
    outcome.result.backend_used = backend.identifier();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BackendUnavailable) throw;
    outcome.failure = BackendFailure{provider_id, segment.segment_id, e.what()};
    if (options.fallback_to_extractive) {
      ExtractiveBackend extractive;
      outcome.result.answer_text = extractive.generate(prompt, passages);
      outcome.result.backend_used = extractive.identifier();
      outcome.result.fell_back = true;
    } else {
      outcome.result.backend_used = "unavailable";
    }
  }
  return outcome;
}

}  // namespace

PolicyArticleMap map_policy_to_articles(const PolicyDocument& policy, const Index& index,
                                        const RetrieverConfig& config, GeneratorBackend& backend,
                                        const MapOptions& options) {
  if (policy.segments.empty()) {
    throw Error(ErrorCode::UpstreamEmptyPolicy,
                "policy '" + policy.provider_id + "' has no segments left to map");
  }
  const std::size_t n = policy.segments.size();
  std::vector<SegmentOutcome> outcomes(n);
  const std::size_t width = std::max<std::size_t>(1, options.max_concurrency);
  if (width == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      outcomes[i] = answer_segment(policy.provider_id, policy.segments[i], index, config, backend,
                                   options);
    }
  } else {
    for (std::size_t start = 0; start < n; start += width) {
      const std::size_t stop = std::min(n, start + width);
      std::vector<std::future<SegmentOutcome>> batch;
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(std::async(std::launch::async, [&, i] {
          return answer_segment(policy.provider_id, policy.segments[i], index, config, backend,
                                options);
        }));
      }
      for (std::size_t i = start; i < stop; ++i) outcomes[i] = batch[i - start].get();
    }
  }

  PolicyArticleMap map;
  ProviderArticles& provider = map.providers[policy.provider_id];
  for (auto& outcome : outcomes) {
    for (const auto& a : outcome.result.articles) provider.articles.insert(a.article_number);
    if (outcome.failure) provider.failures.push_back(std::move(*outcome.failure));
    provider.segments.push_back(std::move(outcome.result));
  }
  return map;
}

}  // namespace privcomp
