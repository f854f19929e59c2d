#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "ipt/protocol.hpp"

namespace ipt {
namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

void ignore_sigpipe() {
  static const bool once = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

// Reads and writes over a pair of descriptors with a per-call deadline.
class FdConnection : public Connection {
 public:
  FdConnection(int read_fd, int write_fd, Timeout timeout, bool owns)
      : read_fd_(read_fd), write_fd_(write_fd), timeout_(timeout), owns_(owns) {}

  ~FdConnection() override { close_fds(); }

  std::size_t read_some(std::span<std::uint8_t> out) override {
    if (out.empty()) return 0;
    wait_for(read_fd_, POLLIN);
    while (true) {
      const ssize_t n = ::read(read_fd_, out.data(), out.size());
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw EndpointError(errno_text("read from model failed"));
    }
  }

  void write_all(std::span<const std::uint8_t> bytes) override {
    std::size_t done = 0;
    while (done < bytes.size()) {
      wait_for(write_fd_, POLLOUT);
      const ssize_t n = is_socket_ ? ::send(write_fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL)
                                   : ::write(write_fd_, bytes.data() + done, bytes.size() - done);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw EndpointError(errno_text("write to model failed"));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  void set_socket(bool s) { is_socket_ = s; }

 protected:
  void close_fds() {
    if (!owns_) return;
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
    read_fd_ = write_fd_ = -1;
  }

 private:
  void wait_for(int fd, short events) const {
    if (timeout_.count() <= 0) return;
    pollfd p{fd, events, 0};
    while (true) {
      const int r = ::poll(&p, 1, static_cast<int>(timeout_.count()));
      if (r > 0) return;
      if (r == 0) throw EndpointError("model timed out after " + std::to_string(timeout_.count()) + " ms");
      if (errno != EINTR) throw EndpointError(errno_text("poll failed"));
    }
  }

  int read_fd_;
  int write_fd_;
  Timeout timeout_;
  bool owns_;
  bool is_socket_ = false;
};

class ChildConnection : public FdConnection {
 public:
  ChildConnection(int read_fd, int write_fd, Timeout timeout, pid_t pid)
      : FdConnection(read_fd, write_fd, timeout, true), pid_(pid) {}

  ~ChildConnection() override {
    close_fds();  // EOF on stdin ends a well-behaved adapter
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }

 private:
  pid_t pid_;
};

std::unique_ptr<Connection> open_tcp(const std::string& host, std::uint16_t port, Timeout timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port_text = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw EndpointError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* a = res; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw EndpointError("cannot connect to tcp:" + host + ":" + port_text);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  auto conn = std::make_unique<FdConnection>(fd, fd, timeout, true);
  conn->set_socket(true);
  return conn;
}

std::unique_ptr<Connection> open_exec(const std::string& command, Timeout timeout) {
  ignore_sigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw EndpointError(errno_text("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw EndpointError(errno_text("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw EndpointError(errno_text("fork"));
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return std::make_unique<ChildConnection>(from_child[0], to_child[1], timeout, pid);
}

}  // namespace

EndpointSpec EndpointSpec::parse(const std::string& text) {
  EndpointSpec spec;
  if (text.starts_with("exec:")) {
    spec.transport = Transport::exec;
    spec.command = text.substr(5);
    if (spec.command.empty()) throw ConfigError("endpoint 'exec:' needs a command");
    return spec;
  }
  if (text.starts_with("tcp:")) {
    const std::string rest = text.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0) throw ConfigError("endpoint must look like tcp:HOST:PORT");
    spec.transport = Transport::tcp;
    spec.host = rest.substr(0, colon);
    const std::string port = rest.substr(colon + 1);
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(port, &used);
      if (used != port.size()) throw std::invalid_argument(port);
    } catch (const std::exception&) {
      throw ConfigError("invalid port '" + port + "' in endpoint");
    }
    if (value <= 0 || value > 65535) throw ConfigError("port out of range in endpoint '" + text + "'");
    spec.port = static_cast<std::uint16_t>(value);
    return spec;
  }
  throw ConfigError("endpoint must start with 'tcp:' or 'exec:', got '" + text + "'");
}

std::string EndpointSpec::to_string() const {
  return transport == Transport::tcp ? "tcp:" + host + ":" + std::to_string(port) : "exec:" + command;
}

std::unique_ptr<Connection> open_connection(const EndpointSpec& spec, Timeout timeout) {
  return spec.transport == EndpointSpec::Transport::tcp ? open_tcp(spec.host, spec.port, timeout)
                                                         : open_exec(spec.command, timeout);
}

bool serve_stdio(const ModelHandler& handler) {
  ignore_sigpipe();
  FdConnection stdio(STDIN_FILENO, STDOUT_FILENO, Timeout{0}, false);
  return serve(stdio, stdio, handler);
}

void serve_tcp(std::uint16_t port, const ModelHandler& handler, std::size_t max_connections,
               const std::function<void(std::uint16_t)>& on_listen) {
  ignore_sigpipe();
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw EndpointError(errno_text("socket"));
  int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listener, 16) != 0) {
    const auto msg = errno_text("bind/listen");
    ::close(listener);
    throw EndpointError(msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  std::vector<std::thread> workers;
  for (std::size_t served = 0; max_connections == 0 || served < max_connections; ++served) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    workers.emplace_back([fd, &handler] {
      FdConnection conn(fd, fd, Timeout{0}, true);
      conn.set_socket(true);
      serve(conn, conn, handler);
    });
  }
  for (auto& w : workers) w.join();
  ::close(listener);
}

}  // namespace ipt
