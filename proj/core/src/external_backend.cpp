#include "privcomp/external_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <utility>

#include "privcomp/error.hpp"

namespace privcomp {

std::string escape_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_line(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] != '\\' || i + 1 == line.size()) {
      out += line[i];
      continue;
    }
    const char e = line[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += e;
    }
  }
  return out;
}

std::string encode_request(const Prompt& prompt, std::span<const RetrievedPassage> passages) {
  std::string text = prompt.rendered;
  if (!passages.empty()) {
    text += "\n\nContext:";
    for (const auto& p : passages) text += "\n[" + p.chunk_id + "] " + p.text;
  }
  return escape_line(text);
}

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void unavailable(const std::string& message) {
  throw Error(ErrorCode::BackendUnavailable, message);
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    reset();
    fd_ = std::exchange(other.fd_, -1);
    return *this;
  }
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(left.count());
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

// Blocks SIGPIPE for the calling thread while writing to a peer that may have
// gone away, and discards any SIGPIPE raised meanwhile.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGPIPE);
    sigset_t pending;
    sigpending(&pending);
    already_pending_ = sigismember(&pending, SIGPIPE) == 1;
    pthread_sigmask(SIG_BLOCK, &set_, &old_);
  }
  ~SigpipeGuard() {
    if (!already_pending_) {
      const timespec zero{0, 0};
      while (sigtimedwait(&set_, nullptr, &zero) > 0) {
      }
    }
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  sigset_t set_{};
  sigset_t old_{};
  bool already_pending_ = false;
};

void write_all(int fd, std::string_view data, Clock::time_point deadline) {
  SigpipeGuard guard;
  while (!data.empty()) {
    pollfd p{fd, POLLOUT, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc == 0) unavailable("timed out sending request");
    if (rc < 0) {
      if (errno == EINTR) continue;
      unavailable(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      unavailable(std::string("write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Reads up to the first '\n'. Returns the line without the terminator, or
// whatever arrived before EOF.
std::string read_line(int fd, Clock::time_point deadline) {
  std::string out;
  char buf[4096];
  for (;;) {
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc == 0) unavailable("timed out waiting for response");
    if (rc < 0) {
      if (errno == EINTR) continue;
      unavailable(std::string("poll failed: ") + std::strerror(errno));
    }
    const ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) continue;
      unavailable(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) return out;
    out.append(buf, static_cast<std::size_t>(n));
    if (auto nl = out.find('\n'); nl != std::string::npos) {
      out.resize(nl);
      return out;
    }
  }
}

std::string finish_response(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty()) unavailable("service returned an empty response");
  return unescape_line(line);
}

}  // namespace

ExternalServiceBackend::ExternalServiceBackend(std::string endpoint,
                                               std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  if (endpoint_.empty()) throw Error(ErrorCode::InvalidArgument, "empty generator endpoint");
  if (timeout_.count() <= 0) throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
}

std::string ExternalServiceBackend::generate(const Prompt& prompt,
                                             std::span<const RetrievedPassage> passages) {
  const std::string request = encode_request(prompt, passages) + "\n";
  if (endpoint_.starts_with("unix:")) return call_unix(endpoint_.substr(5), request);
  if (endpoint_.starts_with("exec:")) return call_exec(endpoint_.substr(5), request);
  return call_exec(endpoint_, request);
}

std::string ExternalServiceBackend::call_exec(const std::string& command,
                                              const std::string& request) {
  const auto deadline = Clock::now() + timeout_;
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) unavailable("pipe failed");
  Fd child_in_w(to_child[1]);
  Fd child_in_r(to_child[0]);
  if (::pipe2(from_child, O_CLOEXEC) != 0) unavailable("pipe failed");
  Fd child_out_r(from_child[0]);
  Fd child_out_w(from_child[1]);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  const pid_t pid = ::fork();
  if (pid < 0) unavailable("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(child_in_r.get(), STDIN_FILENO);
    ::dup2(child_out_w.get(), STDOUT_FILENO);
    ::execv("/bin/sh", const_cast<char* const*>(argv));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  child_in_r.reset();
  child_out_w.reset();
  set_nonblocking(child_in_w.get());
  set_nonblocking(child_out_r.get());

  auto reap = [pid](bool kill_first) {
    if (kill_first) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
    }
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    return status;
  };

  std::string line;
  try {
    write_all(child_in_w.get(), request, deadline);
    child_in_w.reset();
    line = read_line(child_out_r.get(), deadline);
  } catch (const Error&) {
    reap(true);
    throw;
  }
  child_out_r.reset();
  // The response is complete; do not wait on a service that lingers.
  int status = 0;
  const pid_t done = ::waitpid(pid, &status, WNOHANG);
  if (done == 0) {
    status = reap(true);
  } else if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
    unavailable("service exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  return finish_response(std::move(line));
}

std::string ExternalServiceBackend::call_unix(const std::string& path, const std::string& request) {
  const auto deadline = Clock::now() + timeout_;
  Fd sock(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (sock.get() < 0) unavailable("socket failed");
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) unavailable("socket path too long");
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  if (::connect(sock.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    unavailable("cannot connect to " + path + ": " + std::strerror(errno));
  }
  set_nonblocking(sock.get());
  write_all(sock.get(), request, deadline);
  ::shutdown(sock.get(), SHUT_WR);
  return finish_response(read_line(sock.get(), deadline));
}

}  // namespace privcomp
