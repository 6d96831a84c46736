#pragma once

#include <chrono>
#include <span>
#include <string>
#include <string_view>

#include "privcomp/rag.hpp"

namespace privcomp {

inline constexpr std::string_view kEndpointEnvVar = "PRIVCOMP_GENERATOR_ENDPOINT";

// Line escaping used on the wire: backslash, newline, carriage return and tab
// become \\, \n, \r and \t.
std::string escape_line(std::string_view text);
std::string unescape_line(std::string_view line);

// The rendered prompt followed by a "Context:" block with one
// "[chunk_id] text" entry per passage, escaped onto one line (no trailing
// newline).
std::string encode_request(const Prompt& prompt, std::span<const RetrievedPassage> passages);

/// Client for an external generation service speaking one escaped request
/// line in, one escaped response line out.
///
/// Endpoints:
///   exec:<command>   run `/bin/sh -c <command>` per request, talk over stdio
///   unix:<path>      connect to a UNIX stream socket per request
/// A bare endpoint without a scheme is treated as exec:.
///
/// Timeouts, transport errors, non-zero exits and empty responses all raise
/// Error(BackendUnavailable).
class ExternalServiceBackend final : public GeneratorBackend {
 public:
  ExternalServiceBackend(std::string endpoint, std::chrono::milliseconds timeout);

  std::string generate(const Prompt& prompt, std::span<const RetrievedPassage> passages) override;
  std::string identifier() const override { return "external"; }
  std::chrono::milliseconds timeout() const override { return timeout_; }

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string call_exec(const std::string& command, const std::string& request);
  std::string call_unix(const std::string& path, const std::string& request);

  std::string endpoint_;
  std::chrono::milliseconds timeout_;
};

}  // namespace privcomp
