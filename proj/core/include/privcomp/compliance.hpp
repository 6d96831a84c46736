#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "privcomp/kg.hpp"
#include "privcomp/regulation.hpp"

namespace privcomp {

struct ArticleDetail {
  int number = 0;
  std::string title;
  std::string excerpt;
  std::optional<std::string> url;

  friend bool operator==(const ArticleDetail&, const ArticleDetail&) = default;
};

struct ComplianceReport {
  std::string provider_id;
  std::vector<int> required;  // ascending
  std::vector<int> complied;  // ascending
  std::vector<int> missing;   // required \ complied, ascending
  std::vector<ArticleDetail> missing_details;  // parallel to `missing`

  bool fully_compliant() const noexcept { return missing.empty(); }
  friend bool operator==(const ComplianceReport&, const ComplianceReport&) = default;
};

// Article titles are not part of the graph; callers holding the regulation
// can supply them for reports.
using ArticleTitles = std::map<int, std::string>;
ArticleTitles article_titles(const RegulationDoc& doc);

// Maps article number -> article IRI for every typed article carrying a
// hasSectionIndex.
std::map<int, Iri> article_index(const Graph& graph);

/// Adds compliesWithSection(provider, article) for each article number.
/// Throws UnknownProvider when the provider is not typed in the graph and
/// UnknownArticle for numbers without an article.
Graph record_compliance(Graph graph, std::string_view provider_id, const std::set<int>& articles);

/// Required = requiresComplianceWith objects, complied = compliesWithSection
/// objects, missing = required \ complied. Expects inference to have run.
ComplianceReport compute_gap(const Graph& graph, std::string_view provider_id,
                             const ArticleTitles* titles = nullptr);

enum class ReportFormat { Human, Machine };

/// Machine format:
///   provider <id> required <n> complied <m> missing <k>
///   missing <number> <title>        (one line per missing article)
std::string render_report(const ComplianceReport& report, ReportFormat format);

}  // namespace privcomp
