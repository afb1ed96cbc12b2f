#include "drivesim/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace drivesim {

namespace {

std::string errno_text() { return std::strerror(errno); }

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || res == nullptr) {
    throw BindFailure("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  sockaddr_in sa = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  sa.sin_port = htons(port);
  return sa;
}

}  // namespace

BindAddress parse_bind_address(std::string_view text) {
  BindAddress addr;
  std::string_view port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) addr.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  unsigned value = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
  if (port_text.empty() || ec != std::errc() || end != port_text.data() + port_text.size() ||
      value > 65535) {
    throw BindFailure("bad address: " + std::string(text));
  }
  addr.port = static_cast<std::uint16_t>(value);
  return addr;
}

Server::Server(std::shared_ptr<const ScenarioSet> scenarios, EnvConfig cfg)
    : scenarios_(std::move(scenarios)), cfg_(cfg) {
  if (!scenarios_ || scenarios_->scenarios.empty()) throw ConfigError("empty scenario set");
  if (::pipe(wake_pipe_) != 0) throw Error("pipe: " + errno_text());
}

Server::~Server() {
  shutdown();
  reap(true);
  if (listen_fd_ >= 0) ::close(listen_fd_);
  ::close(wake_pipe_[0]);
  ::close(wake_pipe_[1]);
}

void Server::bind(const BindAddress& addr) {
  const sockaddr_in sa = resolve(addr.host, addr.port);
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw BindFailure("socket: " + errno_text());
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0 || ::listen(fd, 64) != 0) {
    const std::string why = errno_text();
    ::close(fd);
    throw BindFailure(addr.host + ":" + std::to_string(addr.port) + ": " + why);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = fd;
}

void Server::serve() {
  if (listen_fd_ < 0) throw BindFailure("serve called before bind");
  while (!stopping_) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
    if (::poll(fds, 2, 1000) < 0) {
      if (errno == EINTR) continue;
      throw Error("poll: " + errno_text());
    }
    reap(false);
    if (stopping_ || (fds[1].revents & POLLIN)) break;
    if (!(fds[0].revents & POLLIN)) continue;
    const int cfd = ::accept(listen_fd_, nullptr, nullptr);
    if (cfd < 0) continue;
    std::lock_guard lock(mu_);
    Connection& c = connections_.emplace_back();
    c.fd = cfd;
    c.worker = std::thread([this, &c] { handle(c); });
  }
  reap(true);
}

void Server::shutdown() {
  if (stopping_.exchange(true)) return;
  const char b = 1;
  [[maybe_unused]] const auto n = ::write(wake_pipe_[1], &b, 1);
}

std::size_t Server::active_connections() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& c : connections_) n += c.finished ? 0 : 1;
  return n;
}

void Server::reap(bool all) {
  std::list<Connection> done;
  {
    std::lock_guard lock(mu_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      auto next = std::next(it);
      if (all || it->finished) {
        if (all) ::shutdown(it->fd, SHUT_RDWR);
        done.splice(done.end(), connections_, it);
      }
      it = next;
    }
  }
  for (auto& c : done) {
    if (c.worker.joinable()) c.worker.join();
    ::close(c.fd);
  }
}

void Server::handle(Connection& c) {
  ProtocolSession session(scenarios_, cfg_);
  std::string buffer;
  bool overflow = false;
  char chunk[1 << 16];
  while (!session.closed()) {
    const ssize_t n = ::recv(c.fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; !session.closed() && (nl = buffer.find('\n', start)) != std::string::npos;
         start = nl + 1) {
      std::string_view line(buffer.data() + start, nl - start);
      std::optional<std::string> reply;
      if (overflow) {
        overflow = false;
        reply = R"({"ok":false,"error":"line too long"})";
      } else {
        reply = session.handle_line(line);
      }
      if (reply && !send_all(c.fd, *reply + "\n")) {
        c.finished = true;
        return;
      }
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxLineBytes) {
      overflow = true;
      buffer.clear();
    }
  }
  c.finished = true;
}

LineClient::LineClient(const std::string& host, std::uint16_t port) {
  const sockaddr_in sa = resolve(host, port);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error("socket: " + errno_text());
  if (::connect(fd_, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    const std::string why = errno_text();
    ::close(fd_);
    fd_ = -1;
    throw Error("connect: " + why);
  }
}

LineClient::~LineClient() { close(); }

void LineClient::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void LineClient::send_line(std::string_view line) {
  std::string data(line);
  data += '\n';
  if (fd_ < 0 || !send_all(fd_, data)) throw Error("send failed");
}

std::optional<std::string> LineClient::read_line() {
  char chunk[1 << 16];
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (fd_ < 0) return std::nullopt;
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::optional<std::string> LineClient::request(std::string_view line) {
  send_line(line);
  return read_line();
}

}  // namespace drivesim
