#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace privcomp {

struct PolicySegment {
  std::string segment_id;
  std::string text;
  std::optional<std::string> category;

  friend bool operator==(const PolicySegment&, const PolicySegment&) = default;
};

struct PolicyDocument {
  std::string provider_id;
  std::string provider_name;
  std::vector<PolicySegment> segments;

  friend bool operator==(const PolicyDocument&, const PolicyDocument&) = default;
};

using SegmentKey = std::pair<std::string, std::string>;  // (provider_id, segment_id)

// Annotated article numbers per policy segment.
struct GroundTruth {
  std::map<SegmentKey, std::set<int>> articles;

  std::size_t size() const noexcept { return articles.size(); }
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

inline constexpr std::size_t kDefaultMinTokens = 10;

// Lowercase slug: [a-z0-9][a-z0-9._-]*
bool is_provider_slug(std::string_view id) noexcept;

// Tokens are maximal runs of non-whitespace characters.
std::size_t count_tokens(std::string_view text) noexcept;

/// Parses a policy corpus:
///
///   #PROVIDER <id> <name>
///   #SEG <id> [<category>]
///   segment text ...
///
/// Throws MalformedSource, DuplicateProvider or EmptySegment.
std::vector<PolicyDocument> load_policies(std::string_view source);

std::string serialize_policies(const std::vector<PolicyDocument>& docs);

// Drops segments with fewer than `min_tokens` tokens, then documents left
// without segments.
std::vector<PolicyDocument> filter_short_segments(const std::vector<PolicyDocument>& docs,
                                                  std::size_t min_tokens);

// `provider_id,segment_id,article_number` rows. Throws UnknownSegment when a
// row names a segment that is not in `docs`.
GroundTruth load_ground_truth(std::string_view source, const std::vector<PolicyDocument>& docs);

// Restricts `truth` to segments that still exist in `docs`.
GroundTruth restrict_ground_truth(const GroundTruth& truth, const std::vector<PolicyDocument>& docs);

}  // namespace privcomp
