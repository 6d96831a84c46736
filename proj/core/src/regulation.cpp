#include "privcomp/regulation.hpp"

#include <set>
#include <sstream>

#include "privcomp/error.hpp"
#include "text_util.hpp"

namespace privcomp {

using detail::BodyBuilder;
using detail::parse_int;
using detail::split_word;
using detail::trim;

const Article* RegulationDoc::find_article(int number) const noexcept {
  for (const auto& chapter : chapters) {
    for (const auto& article : chapter.articles) {
      if (article.number == number) return &article;
    }
  }
  return nullptr;
}

std::size_t RegulationDoc::article_count() const noexcept {
  std::size_t n = 0;
  for (const auto& chapter : chapters) n += chapter.articles.size();
  return n;
}

std::string_view to_string(ObligationRole role) noexcept {
  switch (role) {
    case ObligationRole::Consumer: return "Consumer";
    case ObligationRole::Common: return "Common";
    case ObligationRole::DataSubject: return "DataSubject";
    case ObligationRole::General: return "General";
    case ObligationRole::Provider: return "Provider";
  }
  return "";
}

std::optional<ObligationRole> parse_role(std::string_view name) noexcept {
  name = trim(name);
  if (name == "Consumer" || name == "Consumer_Obligations") return ObligationRole::Consumer;
  if (name == "Common" || name == "Common_Obligations") return ObligationRole::Common;
  if (name == "DataSubject" || name == "Data_Subject_Obligations") {
    return ObligationRole::DataSubject;
  }
  if (name == "General" || name == "General_Obligations") return ObligationRole::General;
  if (name == "Provider" || name == "Provider_Obligations") return ObligationRole::Provider;
  return std::nullopt;
}

namespace {

bool is_comment(std::string_view line) noexcept {
  return line == "#" || line.starts_with("# ") || line.starts_with("#\t");
}

int positive_int(std::string_view token, std::string_view what, std::size_t line) {
  auto value = parse_int(token);
  if (!value || *value < 1 || *value > 1'000'000'000) {
    throw Error(ErrorCode::MalformedSource,
                std::string(what) + " must be a positive integer, got '" + std::string(token) + "'",
                line);
  }
  return static_cast<int>(*value);
}

class RegulationParser {
 public:
  RegulationDoc run(std::string_view source) {
    const auto lines = detail::split_lines(source);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      line_no_ = i + 1;
      std::string_view line = lines[i];
      if (is_comment(line)) continue;
      if (line.starts_with('#')) {
        directive(line);
      } else {
        body(line);
      }
    }
    finish_paragraph();
    finish_chapter();
    if (!have_header_ && doc_.chapters.empty()) {
      throw Error(ErrorCode::EmptyDocument, "source contains no regulation");
    }
    if (doc_.chapters.empty()) {
      throw Error(ErrorCode::EmptyDocument, "regulation '" + doc_.regulation_id + "' has no chapters");
    }
    return std::move(doc_);
  }

 private:
  void directive(std::string_view line) {
    auto [keyword, rest] = split_word(line);
    if (keyword == "#REG") {
      reg(rest);
    } else if (keyword == "#CH") {
      chapter(rest);
    } else if (keyword == "#ART") {
      article(rest);
    } else if (keyword == "#P") {
      paragraph(rest);
    } else {
      fail("unknown directive '" + std::string(keyword) + "'");
    }
  }

  void reg(std::string_view rest) {
    if (have_header_) fail("duplicate #REG header");
    auto [id, title] = split_word(rest);
    if (id.empty() || title.empty()) fail("#REG requires an identifier and a title");
    doc_.regulation_id = std::string(id);
    doc_.title = std::string(title);
    have_header_ = true;
  }

  void chapter(std::string_view rest) {
    require_header();
    finish_paragraph();
    finish_chapter();
    auto [index_token, title] = split_word(rest);
    const int index = positive_int(index_token, "chapter index", line_no_);
    if (!doc_.chapters.empty() && index <= doc_.chapters.back().index) {
      fail("chapter indices must be strictly increasing");
    }
    if (title.empty()) fail("chapter " + std::to_string(index) + " has no title");
    doc_.chapters.push_back(Chapter{index, std::string(title), {}});
    chapter_line_ = line_no_;
    in_article_ = false;
  }

  void article(std::string_view rest) {
    require_header();
    if (doc_.chapters.empty()) fail("#ART before any #CH");
    finish_paragraph();
    auto [number_token, remainder] = split_word(rest);
    const int number = positive_int(number_token, "article number", line_no_);
    if (!numbers_.insert(number).second) {
      throw Error(ErrorCode::DuplicateArticle,
                  "article " + std::to_string(number) + " appears more than once", line_no_);
    }
    Article art;
    art.number = number;
    std::string_view title = remainder;
    const auto last_space = title.find_last_of(" \t");
    if (last_space != std::string_view::npos &&
        detail::starts_with_url(trim(title.substr(last_space + 1)))) {
      art.source_url = std::string(trim(title.substr(last_space + 1)));
      title = trim(title.substr(0, last_space));
    } else if (detail::starts_with_url(title)) {
      fail("article " + std::to_string(number) + " has a URL but no title");
    }
    if (title.empty()) fail("article " + std::to_string(number) + " has no title");
    art.title = std::string(title);
    doc_.chapters.back().articles.push_back(std::move(art));
    in_article_ = true;
  }

  void paragraph(std::string_view rest) {
    if (!in_article_) fail("#P outside of an article");
    finish_paragraph();
    auto [index_token, extra] = split_word(rest);
    if (!extra.empty()) fail("unexpected text after paragraph index");
    const int index = positive_int(index_token, "paragraph index", line_no_);
    for (const auto& p : current_article().paragraphs) {
      if (p.index == index) {
        fail("paragraph " + std::to_string(index) + " repeated in article " +
             std::to_string(current_article().number));
      }
    }
    open_paragraph_ = index;
    paragraph_line_ = line_no_;
  }

  void body(std::string_view line) {
    if (open_paragraph_) {
      text_.add(line);
      return;
    }
    if (!detail::is_blank(line)) fail("text outside of a paragraph");
  }

  void finish_paragraph() {
    if (!open_paragraph_) return;
    std::string text = text_.take();
    if (detail::is_blank(text)) {
      throw Error(ErrorCode::MalformedSource,
                  "paragraph " + std::to_string(*open_paragraph_) + " has no text", paragraph_line_);
    }
    current_article().paragraphs.push_back(Paragraph{*open_paragraph_, std::move(text)});
    open_paragraph_.reset();
  }

  void finish_chapter() {
    if (!doc_.chapters.empty() && doc_.chapters.back().articles.empty()) {
      throw Error(ErrorCode::MalformedSource,
                  "chapter " + std::to_string(doc_.chapters.back().index) + " has no articles",
                  chapter_line_);
    }
  }

  void require_header() {
    if (!have_header_) fail("missing #REG header");
  }

  Article& current_article() { return doc_.chapters.back().articles.back(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::MalformedSource, message, line_no_);
  }

  RegulationDoc doc_;
  std::set<int> numbers_;
  BodyBuilder text_;
  std::optional<int> open_paragraph_;
  std::size_t line_no_ = 0;
  std::size_t chapter_line_ = 0;
  std::size_t paragraph_line_ = 0;
  bool have_header_ = false;
  bool in_article_ = false;
};

}  // namespace

RegulationDoc parse_regulation(std::string_view source) { return RegulationParser{}.run(source); }

std::string serialize_regulation(const RegulationDoc& doc) {
  std::ostringstream out;
  out << "#REG " << doc.regulation_id << ' ' << doc.title << '\n';
  for (const auto& chapter : doc.chapters) {
    out << "\n#CH " << chapter.index << ' ' << chapter.title << '\n';
    for (const auto& article : chapter.articles) {
      out << "\n#ART " << article.number << ' ' << article.title;
      if (article.source_url) out << ' ' << *article.source_url;
      out << '\n';
      for (const auto& paragraph : article.paragraphs) {
        out << "#P " << paragraph.index << '\n' << paragraph.text << '\n';
      }
    }
  }
  return out.str();
}

std::vector<ArticleChunk> chunk_regulation(const RegulationDoc& doc) {
  std::vector<ArticleChunk> chunks;
  for (const auto& chapter : doc.chapters) {
    for (const auto& article : chapter.articles) {
      const std::string prefix = "ART" + std::to_string(article.number) + "-P";
      if (article.paragraphs.empty()) {
        chunks.push_back({prefix + "0", article.number, 0, article.title});
        continue;
      }
      for (const auto& paragraph : article.paragraphs) {
        chunks.push_back({prefix + std::to_string(paragraph.index), article.number,
                          paragraph.index, paragraph.text});
      }
    }
  }
  return chunks;
}

std::vector<ObligationAssignment> load_obligation_map(std::string_view source,
                                                      const RegulationDoc& doc) {
  std::vector<ObligationAssignment> out;
  std::set<ObligationAssignment> seen;
  const auto lines = detail::split_lines(source);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw Error(ErrorCode::MalformedSource, "expected 'article_number,role'", line_no);
    }
    const auto number = parse_int(line.substr(0, comma));
    if (!number || *number < 1) {
      throw Error(ErrorCode::MalformedSource, "article number must be a positive integer", line_no);
    }
    const auto role_name = trim(line.substr(comma + 1));
    const auto role = parse_role(role_name);
    if (!role) {
      throw Error(ErrorCode::UnknownRole, "unknown obligation role '" + std::string(role_name) + "'",
                  line_no);
    }
    if (*number > 1'000'000'000 || doc.find_article(static_cast<int>(*number)) == nullptr) {
      throw Error(ErrorCode::UnknownArticle,
                  "article " + std::to_string(*number) + " is not in " + doc.regulation_id, line_no);
    }
    ObligationAssignment assignment{static_cast<int>(*number), *role};
    if (!seen.insert(assignment).second) {
      throw Error(ErrorCode::MalformedSource, "duplicate assignment", line_no);
    }
    out.push_back(assignment);
  }
  return out;
}

std::string roman_numeral(int value) {
  static constexpr std::pair<int, const char*> kTable[] = {
      {1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"}, {100, "C"}, {90, "XC"},
      {50, "L"},   {40, "XL"},  {10, "X"},  {9, "IX"},   {5, "V"},   {4, "IV"}, {1, "I"}};
  if (value <= 0) return std::to_string(value);
  std::string out;
  for (const auto& [amount, glyph] : kTable) {
    while (value >= amount) {
      out += glyph;
      value -= amount;
    }
  }
  return out;
}

}  // namespace privcomp
