#include "privcomp/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "privcomp/error.hpp"

namespace privcomp {

CorrectnessResult correctness_at(const PolicyArticleMap& predictions, const GroundTruth& truth,
                                 double threshold) {
  CorrectnessResult result;
  result.threshold = threshold;
  bool overlap = false;
  for (const auto& [key, expected] : truth.articles) {
    std::set<int> predicted;
    if (const SegmentResult* seg = predictions.find_segment(key.first, key.second)) {
      overlap = true;
      for (const auto& a : seg->articles) predicted.insert(a.article_number);
    }
    for (int a : predicted) {
      if (expected.contains(a)) {
        ++result.true_positives;
      } else {
        ++result.false_positives;
      }
    }
    for (int a : expected) {
      if (!predicted.contains(a)) ++result.false_negatives;
    }
    ++result.n_segments;
  }
  if (!overlap) {
    throw Error(ErrorCode::NoOverlap, "predictions cover none of the annotated segments");
  }
  const auto tp = static_cast<double>(result.true_positives);
  const auto fp = static_cast<double>(result.false_positives);
  const auto fn = static_cast<double>(result.false_negatives);
  result.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
  result.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
  const double denom = result.precision + result.recall;
  result.f1 = denom > 0 ? 2.0 * result.precision * result.recall / denom : 0.0;
  return result;
}

std::vector<CorrectnessResult> sweep(const std::vector<ArticleChunk>& corpus,
                                     const std::vector<PolicyDocument>& policies,
                                     const GroundTruth& truth, const SweepConfig& config) {
  if (config.thresholds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs at least one threshold");
  }
  for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
    const double t = config.thresholds[i];
    if (!(t > 0.0) || !std::isfinite(t) || (i > 0 && t <= config.thresholds[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "thresholds must be positive and strictly increasing");
    }
  }
  if (config.min_tokens < 1) throw Error(ErrorCode::InvalidArgument, "min_tokens must be >= 1");

  const auto kept = filter_short_segments(policies, config.min_tokens);
  const GroundTruth scored_truth = restrict_ground_truth(truth, kept);
  const Index index = build_index(corpus, config.retriever);
  ExtractiveBackend backend;

  std::vector<CorrectnessResult> results;
  for (double threshold : config.thresholds) {
    RetrieverConfig rc = config.retriever;
    rc.threshold = threshold;
    PolicyArticleMap predictions;
    for (const auto& policy : kept) {
      predictions.merge(map_policy_to_articles(policy, index, rc, backend));
    }
    results.push_back(correctness_at(predictions, scored_truth, threshold));
  }
  return results;
}

std::optional<double> reference_correctness(double threshold) {
  static constexpr std::pair<double, double> kReference[] = {
      {0.9, 0.66}, {1.0, 0.74}, {1.1, 0.82}, {1.2, 0.84}, {1.3, 0.89}, {1.4, 0.88}, {1.5, 0.90}};
  for (const auto& [t, score] : kReference) {
    if (std::abs(t - threshold) < 1e-9) return score;
  }
  return std::nullopt;
}

std::string render_sweep_table(const std::vector<CorrectnessResult>& results) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-10s %-10s %-10s %-11s %s\n", "threshold", "precision",
                "recall", "f1", "n_segments", "reference");
  out << line;
  for (const auto& r : results) {
    const auto ref = reference_correctness(r.threshold);
    char ref_text[16] = "-";
    if (ref) std::snprintf(ref_text, sizeof ref_text, "%.2f", *ref);
    std::snprintf(line, sizeof line, "%-10.2f %-10.4f %-10.4f %-10.4f %-11zu %s\n", r.threshold,
                  r.precision, r.recall, r.f1, r.n_segments, ref_text);
    out << line;
  }
  out << "# correctness = micro-F1 over per-segment article sets\n"
      << "# reference = correctness reported for a neural-embedding retriever at the same\n"
      << "#   threshold; its distance scale differs, so the columns are not comparable\n";
  return out.str();
}

}  // namespace privcomp
