#include "privcomp/policy.hpp"

#include <cctype>
#include <sstream>

#include "privcomp/error.hpp"
#include "text_util.hpp"

namespace privcomp {

using detail::split_word;
using detail::trim;

bool is_provider_slug(std::string_view id) noexcept {
  if (id.empty()) return false;
  auto lower_alnum = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  };
  if (!lower_alnum(id.front())) return false;
  for (char c : id) {
    if (!lower_alnum(c) && c != '.' && c != '-' && c != '_') return false;
  }
  return true;
}

std::size_t count_tokens(std::string_view text) noexcept {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

namespace {

bool is_comment(std::string_view line) noexcept {
  return line == "#" || line.starts_with("# ") || line.starts_with("#\t");
}

class PolicyParser {
 public:
  std::vector<PolicyDocument> run(std::string_view source) {
    const auto lines = detail::split_lines(source);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      line_no_ = i + 1;
      const std::string_view line = lines[i];
      if (is_comment(line)) continue;
      if (line.starts_with('#')) {
        auto [keyword, rest] = split_word(line);
        if (keyword == "#PROVIDER") {
          provider(rest);
        } else if (keyword == "#SEG") {
          segment(rest);
        } else {
          fail("unknown directive '" + std::string(keyword) + "'");
        }
      } else if (open_segment_) {
        text_.add(line);
      } else if (!detail::is_blank(line)) {
        fail("text outside of a segment");
      }
    }
    finish_segment();
    finish_provider();
    return std::move(docs_);
  }

 private:
  void provider(std::string_view rest) {
    finish_segment();
    finish_provider();
    auto [id, name] = split_word(rest);
    if (!is_provider_slug(id)) fail("provider id '" + std::string(id) + "' is not a lowercase slug");
    for (const auto& doc : docs_) {
      if (doc.provider_id == id) {
        throw Error(ErrorCode::DuplicateProvider, "provider '" + std::string(id) + "' repeated",
                    line_no_);
      }
    }
    docs_.push_back(PolicyDocument{std::string(id), std::string(name.empty() ? id : name), {}});
    provider_line_ = line_no_;
  }

  void segment(std::string_view rest) {
    if (docs_.empty()) fail("#SEG before any #PROVIDER");
    finish_segment();
    auto [id, category] = split_word(rest);
    if (id.empty()) fail("#SEG requires a segment id");
    for (const auto& seg : docs_.back().segments) {
      if (seg.segment_id == id) fail("segment '" + std::string(id) + "' repeated");
    }
    PolicySegment seg;
    seg.segment_id = std::string(id);
    if (!category.empty()) seg.category = std::string(category);
    pending_ = std::move(seg);
    open_segment_ = true;
    segment_line_ = line_no_;
  }

  void finish_segment() {
    if (!open_segment_) return;
    pending_.text = text_.take();
    if (detail::is_blank(pending_.text)) {
      throw Error(ErrorCode::EmptySegment,
                  "segment '" + pending_.segment_id + "' of provider '" + docs_.back().provider_id +
                      "' has no text",
                  segment_line_);
    }
    docs_.back().segments.push_back(std::move(pending_));
    pending_ = {};
    open_segment_ = false;
  }

  void finish_provider() {
    if (!docs_.empty() && docs_.back().segments.empty()) {
      throw Error(ErrorCode::MalformedSource,
                  "provider '" + docs_.back().provider_id + "' has no segments", provider_line_);
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::MalformedSource, message, line_no_);
  }

  std::vector<PolicyDocument> docs_;
  PolicySegment pending_;
  detail::BodyBuilder text_;
  bool open_segment_ = false;
  std::size_t line_no_ = 0;
  std::size_t provider_line_ = 0;
  std::size_t segment_line_ = 0;
};

}  // namespace

std::vector<PolicyDocument> load_policies(std::string_view source) {
  return PolicyParser{}.run(source);
}

std::string serialize_policies(const std::vector<PolicyDocument>& docs) {
  std::ostringstream out;
  for (const auto& doc : docs) {
    out << "#PROVIDER " << doc.provider_id << ' ' << doc.provider_name << '\n';
    for (const auto& seg : doc.segments) {
      out << "#SEG " << seg.segment_id;
      if (seg.category) out << ' ' << *seg.category;
      out << '\n' << seg.text << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<PolicyDocument> filter_short_segments(const std::vector<PolicyDocument>& docs,
                                                  std::size_t min_tokens) {
  std::vector<PolicyDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    PolicyDocument kept{doc.provider_id, doc.provider_name, {}};
    for (const auto& seg : doc.segments) {
      if (count_tokens(seg.text) >= min_tokens) kept.segments.push_back(seg);
    }
    if (!kept.segments.empty()) out.push_back(std::move(kept));
  }
  return out;
}

namespace {

bool has_segment(const std::vector<PolicyDocument>& docs, std::string_view provider,
                 std::string_view segment) {
  for (const auto& doc : docs) {
    if (doc.provider_id != provider) continue;
    for (const auto& seg : doc.segments) {
      if (seg.segment_id == segment) return true;
    }
  }
  return false;
}

}  // namespace

GroundTruth load_ground_truth(std::string_view source, const std::vector<PolicyDocument>& docs) {
  GroundTruth truth;
  const auto lines = detail::split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto second = first == std::string_view::npos ? first : line.find(',', first + 1);
    if (second == std::string_view::npos || line.find(',', second + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedSource, "expected 'provider_id,segment_id,article_number'",
                  line_no);
    }
    const auto provider = trim(line.substr(0, first));
    const auto segment = trim(line.substr(first + 1, second - first - 1));
    const auto article = detail::parse_int(line.substr(second + 1));
    if (provider.empty() || segment.empty()) {
      throw Error(ErrorCode::MalformedSource, "empty provider or segment id", line_no);
    }
    if (!article || *article < 1 || *article > 1'000'000'000) {
      throw Error(ErrorCode::MalformedSource, "article number must be a positive integer", line_no);
    }
    if (!has_segment(docs, provider, segment)) {
      throw Error(ErrorCode::UnknownSegment,
                  "segment '" + std::string(provider) + "/" + std::string(segment) + "' not in corpus",
                  line_no);
    }
    truth.articles[{std::string(provider), std::string(segment)}].insert(static_cast<int>(*article));
  }
  return truth;
}

GroundTruth restrict_ground_truth(const GroundTruth& truth,
                                  const std::vector<PolicyDocument>& docs) {
  GroundTruth out;
  for (const auto& [key, articles] : truth.articles) {
    if (has_segment(docs, key.first, key.second)) out.articles.emplace(key, articles);
  }
  return out;
}

}  // namespace privcomp
