#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace privcomp {

enum class ErrorCode {
  MalformedSource,
  DuplicateArticle,
  EmptyDocument,
  UnknownArticle,
  UnknownRole,
  DuplicateProvider,
  EmptySegment,
  UnknownSegment,
  UnknownProvider,
  NonGroundTriple,
  TurtleSyntax,
  EmptyCorpus,
  BackendUnavailable,
  UpstreamEmptyPolicy,
  EmptyRoleSet,
  RuleSyntax,
  UnsafeRule,
  DuplicateRule,
  IterationCap,
  NoOverlap,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception. `line()` is the
// 1-based source line for parse errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace privcomp
