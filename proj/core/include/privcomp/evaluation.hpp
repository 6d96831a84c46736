#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privcomp/policy.hpp"
#include "privcomp/rag.hpp"
#include "privcomp/retrieval.hpp"

namespace privcomp {

// Micro-averaged precision/recall/F1 over per-segment article sets. F1 is 0
// when precision + recall is 0.
struct CorrectnessResult {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_segments = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;

  friend bool operator==(const CorrectnessResult&, const CorrectnessResult&) = default;
};

/// Scores every annotated segment of `truth`. A segment absent from
/// `predictions` counts as an empty prediction; predicted segments without
/// annotations are ignored. Throws NoOverlap when no annotated segment was
/// predicted at all.
CorrectnessResult correctness_at(const PolicyArticleMap& predictions, const GroundTruth& truth,
                                 double threshold = 0.0);

struct SweepConfig {
  std::vector<double> thresholds;  // strictly increasing, positive
  std::size_t min_tokens = kDefaultMinTokens;
  RetrieverConfig retriever;       // threshold is overridden per sweep point
};

/// Filters short segments, builds one index over `corpus`, then scores the
/// extractive pipeline at each threshold.
std::vector<CorrectnessResult> sweep(const std::vector<ArticleChunk>& corpus,
                                     const std::vector<PolicyDocument>& policies,
                                     const GroundTruth& truth, const SweepConfig& config);

// Correctness reported for the original neural-embedding setup; shown next
// to local results for orientation only.
std::optional<double> reference_correctness(double threshold);

std::string render_sweep_table(const std::vector<CorrectnessResult>& results);

}  // namespace privcomp
