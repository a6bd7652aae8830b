#include <csignal>
#include <cstring>
#include <map>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "lobbylink/error.hpp"
#include "lobbylink/providers.hpp"

namespace lobbylink::providers {
namespace {

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const std::string& data, bool socket) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = socket ? ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL)
                             : ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::provider_error, "provider write failed: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

/// Buffered line reader over a file descriptor with a deadline.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  std::string next(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw Error(ErrorKind::timeout, "provider did not answer within " +
                                                                 std::to_string(timeout.count()) + " ms");
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::provider_error, "poll failed: " + errno_text());
      }
      if (r == 0) continue;
      char chunk[65536];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw Error(ErrorKind::provider_error, "provider read failed: " + errno_text());
      }
      if (n == 0) throw Error(ErrorKind::provider_error, "provider closed the connection");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
};

class ProcessChannel final : public LineChannel {
 public:
  explicit ProcessChannel(const std::string& command) {
    int to_child[2], from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0)
      throw Error(ErrorKind::provider_error, "pipe failed: " + errno_text());
    pid_ = ::fork();
    if (pid_ < 0) throw Error(ErrorKind::provider_error, "fork failed: " + errno_text());
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = to_child[1];
    out_ = from_child[0];
    reader_ = std::make_unique<LineReader>(out_);
  }

  ~ProcessChannel() override {
    ::close(in_);  // EOF ends the child's request loop
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        ::close(out_);
        return;
      }
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    ::close(out_);
  }

  void send_line(const std::string& line) override { write_all(in_, line + "\n", false); }
  std::string receive_line(std::chrono::milliseconds timeout) override { return reader_->next(timeout); }

 private:
  pid_t pid_ = -1;
  int in_ = -1, out_ = -1;
  std::unique_ptr<LineReader> reader_;
};

class TcpChannel final : public LineChannel {
 public:
  TcpChannel(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
      throw Error(ErrorKind::provider_error, "cannot resolve " + host + ": " + ::gai_strerror(rc));
    for (addrinfo* a = res; a; a = a->ai_next) {
      fd_ = ::socket(a->ai_family, a->ai_socktype | SOCK_CLOEXEC, a->ai_protocol);
      if (fd_ < 0) continue;
      if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
      ::close(fd_);
      fd_ = -1;
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw Error(ErrorKind::provider_error, "cannot connect to " + host + ":" + service);
    reader_ = std::make_unique<LineReader>(fd_);
  }
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send_line(const std::string& line) override { write_all(fd_, line + "\n", true); }
  std::string receive_line(std::chrono::milliseconds timeout) override { return reader_->next(timeout); }

 private:
  int fd_ = -1;
  std::unique_ptr<LineReader> reader_;
};

}  // namespace

std::unique_ptr<LineChannel> spawn_process_channel(const std::string& command) {
  std::signal(SIGPIPE, SIG_IGN);  // a dead child must surface as a write error
  return std::make_unique<ProcessChannel>(command);
}

std::unique_ptr<LineChannel> connect_tcp_channel(const std::string& host, int port) {
  return std::make_unique<TcpChannel>(host, port);
}

std::vector<InferenceResponse> BuiltinBackend::call(std::span<const InferenceRequest> requests) {
  std::vector<InferenceResponse> out;
  for (const auto& r : requests) {
    InferenceResponse resp;
    resp.id = r.id;
    try {
      switch (r.task) {
        case Task::embed: {
          auto e = embedder_.embed(r.text);
          resp.payload = std::vector<double>(e.values().begin(), e.values().end());
          break;
        }
        case Task::nli:
          resp.payload = heuristic_nli(r.premise, r.hypothesis);
          break;
        case Task::summarize:
          resp.error = "summarization is not available in the builtin provider";
          break;
      }
    } catch (const Error& e) {
      resp.error = e.what();
    }
    out.push_back(std::move(resp));
  }
  return out;
}

ProtocolBackend::ProtocolBackend(std::unique_ptr<LineChannel> channel, std::string tag,
                                 std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), tag_(std::move(tag)), timeout_(timeout) {}

std::vector<InferenceResponse> ProtocolBackend::call(std::span<const InferenceRequest> requests) {
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < requests.size(); ++i)
    if (!slot.emplace(requests[i].id, i).second)
      throw Error(ErrorKind::invalid_argument, "request id '" + requests[i].id + "' is already in flight");
  for (const auto& r : requests) channel_->send_line(encode_request(r));

  std::vector<std::optional<InferenceResponse>> got(requests.size());
  for (std::size_t received = 0; received < requests.size(); ++received) {
    const std::string line = channel_->receive_line(timeout_);
    const std::string id = response_id(line);
    auto it = slot.find(id);
    if (it == slot.end() || got[it->second])
      throw Error(ErrorKind::malformed_response, "response id '" + id + "' matches no pending request");
    got[it->second] = decode_response(line, requests[it->second].task);
  }
  std::vector<InferenceResponse> out;
  for (auto& g : got) out.push_back(std::move(*g));
  return out;
}

std::unique_ptr<Backend> make_backend(const std::string& endpoint, std::size_t dim, std::uint64_t seed,
                                      std::chrono::milliseconds timeout) {
  if (endpoint == "builtin") return std::make_unique<BuiltinBackend>(dim, seed);
  if (endpoint.rfind("exec:", 0) == 0) {
    const std::string cmd = endpoint.substr(5);
    if (cmd.empty()) throw Error(ErrorKind::invalid_argument, "exec endpoint needs a command");
    return std::make_unique<ProtocolBackend>(spawn_process_channel(cmd), endpoint, timeout);
  }
  if (endpoint.rfind("tcp:", 0) == 0) {
    const std::string rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0)
      throw Error(ErrorKind::invalid_argument, "tcp endpoint must be tcp:<host>:<port>");
    int port = 0;
    try {
      port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_argument, "bad port in endpoint '" + endpoint + "'");
    }
    return std::make_unique<ProtocolBackend>(connect_tcp_channel(rest.substr(0, colon), port), endpoint, timeout);
  }
  throw Error(ErrorKind::invalid_argument, "unknown provider endpoint '" + endpoint + "'");
}

}  // namespace lobbylink::providers
