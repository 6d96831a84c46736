#include "text_util.hpp"

#include <cctype>
#include <charconv>

namespace privcomp::detail {

namespace {
bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}
}  // namespace

std::string_view trim_right(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return trim_right(s);
}

bool is_blank(std::string_view s) noexcept { return trim(s).empty(); }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (!lines.empty() && !lines.back().empty() && lines.back().back() == '\r') {
    lines.back().remove_suffix(1);
  }
  return lines;
}

std::pair<std::string_view, std::string_view> split_word(std::string_view s) noexcept {
  s = trim(s);
  std::size_t i = 0;
  while (i < s.size() && !is_space(s[i])) ++i;
  return {s.substr(0, i), trim(s.substr(i))};
}

std::optional<long long> parse_int(std::string_view s) noexcept {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool starts_with_url(std::string_view s) noexcept {
  return s.starts_with("http://") || s.starts_with("https://");
}

void BodyBuilder::add(std::string_view line) {
  line = trim_right(line);
  if (lines_.empty() && line.empty()) return;
  lines_.emplace_back(line);
}

std::string BodyBuilder::take() {
  while (!lines_.empty() && lines_.back().empty()) lines_.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines_[i];
  }
  lines_.clear();
  return out;
}

}  // namespace privcomp::detail
