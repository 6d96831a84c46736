#include "privcomp/error.hpp"

namespace privcomp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedSource: return "MalformedSource";
    case ErrorCode::DuplicateArticle: return "DuplicateArticle";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::UnknownArticle: return "UnknownArticle";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::DuplicateProvider: return "DuplicateProvider";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::UnknownSegment: return "UnknownSegment";
    case ErrorCode::UnknownProvider: return "UnknownProvider";
    case ErrorCode::NonGroundTriple: return "NonGroundTriple";
    case ErrorCode::TurtleSyntax: return "TurtleSyntax";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::UpstreamEmptyPolicy: return "UpstreamEmptyPolicy";
    case ErrorCode::EmptyRoleSet: return "EmptyRoleSet";
    case ErrorCode::RuleSyntax: return "RuleSyntax";
    case ErrorCode::UnsafeRule: return "UnsafeRule";
    case ErrorCode::DuplicateRule: return "DuplicateRule";
    case ErrorCode::IterationCap: return "IterationCap";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line > 0) {
    out += " (line " + std::to_string(line) + ")";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace privcomp
