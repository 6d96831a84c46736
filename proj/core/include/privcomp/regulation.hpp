#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privcomp {

struct Paragraph {
  int index = 0;
  std::string text;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Article {
  int number = 0;
  std::string title;
  std::optional<std::string> source_url;
  std::vector<Paragraph> paragraphs;

  friend bool operator==(const Article&, const Article&) = default;
};

struct Chapter {
  int index = 0;
  std::string title;
  std::vector<Article> articles;

  friend bool operator==(const Chapter&, const Chapter&) = default;
};

struct RegulationDoc {
  std::string regulation_id;
  std::string title;
  std::vector<Chapter> chapters;

  const Article* find_article(int number) const noexcept;
  std::size_t article_count() const noexcept;

  friend bool operator==(const RegulationDoc&, const RegulationDoc&) = default;
};

// One regulation paragraph, the unit of retrieval.
struct ArticleChunk {
  std::string chunk_id;
  int article_number = 0;
  int paragraph_index = 0;
  std::string text;

  friend bool operator==(const ArticleChunk&, const ArticleChunk&) = default;
};

enum class ObligationRole { Consumer, Common, DataSubject, General, Provider };

inline constexpr std::array<ObligationRole, 5> kAllObligationRoles = {
    ObligationRole::Consumer, ObligationRole::Common, ObligationRole::DataSubject,
    ObligationRole::General, ObligationRole::Provider};

std::string_view to_string(ObligationRole role) noexcept;
// Accepts the short role name ("DataSubject") or the obligation instance
// name ("Data_Subject_Obligations").
std::optional<ObligationRole> parse_role(std::string_view name) noexcept;

struct ObligationAssignment {
  int article_number = 0;
  ObligationRole role = ObligationRole::General;

  friend auto operator<=>(const ObligationAssignment&, const ObligationAssignment&) = default;
};

/// Parses the line-oriented regulation format:
///
///   #REG <id> <title>
///   #CH <index> <title>
///   #ART <number> <title> [<url>]
///   #P <index>
///   paragraph text, possibly spanning several lines
///
/// Lines starting with "# " (or a bare "#") are comments. Paragraph text may
/// not start a line with '#'. Throws Error with MalformedSource,
/// DuplicateArticle or EmptyDocument.
RegulationDoc parse_regulation(std::string_view source);

// Inverse of parse_regulation for any valid document.
std::string serialize_regulation(const RegulationDoc& doc);

// One chunk per paragraph in document order; paragraph-less articles yield a
// single ART<n>-P0 chunk carrying the article title.
std::vector<ArticleChunk> chunk_regulation(const RegulationDoc& doc);

// `article_number,role` rows; '#' starts a comment.
std::vector<ObligationAssignment> load_obligation_map(std::string_view source,
                                                      const RegulationDoc& doc);

std::string roman_numeral(int value);

}  // namespace privcomp
