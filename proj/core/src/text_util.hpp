#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privcomp::detail {

std::string_view trim(std::string_view s) noexcept;
std::string_view trim_right(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;

// Splits on '\n'; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

// Splits off the first whitespace-delimited word: returns {word, rest-trimmed}.
std::pair<std::string_view, std::string_view> split_word(std::string_view s) noexcept;

std::optional<long long> parse_int(std::string_view s) noexcept;

bool starts_with_url(std::string_view s) noexcept;

// Accumulates the body lines of a marker-delimited record. Leading and
// trailing blank lines are dropped; interior lines keep their text minus
// trailing whitespace and are joined with '\n'.
class BodyBuilder {
 public:
  void add(std::string_view line);
  std::string take();
  bool empty() const noexcept { return lines_.empty(); }

 private:
  std::vector<std::string> lines_;
};

}  // namespace privcomp::detail
