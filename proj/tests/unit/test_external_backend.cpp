#include <gtest/gtest.h>

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <chrono>
#include <thread>

#include "privcomp/error.hpp"
#include "privcomp/external_backend.hpp"
#include "test_support.hpp"

namespace privcomp {
namespace {

using namespace std::chrono_literals;

const Prompt kPrompt = build_prompt({"s1", "We encrypt\tdata.", {}});
const std::vector<RetrievedPassage> kPassages = {{"ART32-P1", 32, 0.2, "Security\nmeasures."}};

ErrorCode failure_code(ExternalServiceBackend& b) {
  try {
    b.generate(kPrompt, kPassages);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no failure";
  return ErrorCode::Io;
}

TEST(LineEscaping, RoundTrip) {
  const std::string raw = "a\\b\nc\rd\te";
  EXPECT_EQ(escape_line(raw), "a\\\\b\\nc\\rd\\te");
  EXPECT_EQ(unescape_line(escape_line(raw)), raw);
  EXPECT_EQ(escape_line(raw).find('\n'), std::string::npos);
}

TEST(EncodeRequest, Layout) {
  const std::string line = encode_request(kPrompt, kPassages);
  EXPECT_EQ(unescape_line(line),
            kPrompt.rendered + "\n\nContext:\n[ART32-P1] Security\nmeasures.");
}

TEST(ExternalBackend, ExecRoundTrip) {
  // The mock answers with the length of the request it read.
  ExternalServiceBackend b("exec:read -r line; printf 'got %s\\n' \"${#line}\"", 2000ms);
  const std::string expected = "got " + std::to_string(encode_request(kPrompt, kPassages).size());
  EXPECT_EQ(b.generate(kPrompt, kPassages), expected);
  EXPECT_EQ(b.identifier(), "external");
}

TEST(ExternalBackend, ResponseIsUnescaped) {
  ExternalServiceBackend b("exec:cat >/dev/null; printf 'Article 32\\\\nline two\\n'", 2000ms);
  EXPECT_EQ(b.generate(kPrompt, kPassages), "Article 32\nline two");
}

TEST(ExternalBackend, TimeoutIsUnavailable) {
  ExternalServiceBackend b("exec:sleep 5", 150ms);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(failure_code(b), ErrorCode::BackendUnavailable);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 3s);
}

TEST(ExternalBackend, FailuresAreUnavailable) {
  ExternalServiceBackend exit_code("exec:cat >/dev/null; echo answer; exit 3", 2000ms);
  EXPECT_EQ(failure_code(exit_code), ErrorCode::BackendUnavailable);
  ExternalServiceBackend empty("exec:cat >/dev/null", 2000ms);
  EXPECT_EQ(failure_code(empty), ErrorCode::BackendUnavailable);
  ExternalServiceBackend missing("exec:/nonexistent/generator", 2000ms);
  EXPECT_EQ(failure_code(missing), ErrorCode::BackendUnavailable);
  ExternalServiceBackend no_socket("unix:/nonexistent/socket", 500ms);
  EXPECT_EQ(failure_code(no_socket), ErrorCode::BackendUnavailable);
}

TEST(ExternalBackend, RejectsBadConfiguration) {
  EXPECT_THROW(ExternalServiceBackend("", 100ms), Error);
  EXPECT_THROW(ExternalServiceBackend("exec:true", 0ms), Error);
}

TEST(ExternalBackend, UnixSocket) {
  testing::TempDir dir("sock");
  const std::string path = dir.file("gen.sock");
  const int server = ::socket(AF_UNIX, SOCK_STREAM, 0);
  ASSERT_GE(server, 0);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  ASSERT_LT(path.size(), sizeof(addr.sun_path));
  std::copy(path.begin(), path.end(), addr.sun_path);
  ASSERT_EQ(::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  ASSERT_EQ(::listen(server, 1), 0);
  std::string received;
  std::thread t([&] {
    const int c = ::accept(server, nullptr, nullptr);
    char buf[4096];
    while (received.find('\n') == std::string::npos) {
      const ssize_t n = ::read(c, buf, sizeof buf);
      if (n <= 0) break;
      received.append(buf, static_cast<std::size_t>(n));
    }
    const std::string reply = "Related GDPR articles: 32.\\nfrom socket\n";
    (void)!::write(c, reply.data(), reply.size());
    ::close(c);
  });
  ExternalServiceBackend b("unix:" + path, 2000ms);
  EXPECT_EQ(b.generate(kPrompt, kPassages), "Related GDPR articles: 32.\nfrom socket");
  t.join();
  ::close(server);
  EXPECT_EQ(received, encode_request(kPrompt, kPassages) + "\n");
}

}  // namespace
}  // namespace privcomp
