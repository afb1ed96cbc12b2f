#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "drivesim/protocol.hpp"

namespace drivesim {

struct BindAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// "host:port", ":port" or "port". Throws BindFailure on anything else.
BindAddress parse_bind_address(std::string_view text);

// Line-delimited JSON over TCP, one ProtocolSession per connection.
class Server {
 public:
  explicit Server(std::shared_ptr<const ScenarioSet> scenarios, EnvConfig cfg = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void bind(const BindAddress& addr);
  std::uint16_t port() const { return port_; }
  // Blocks until shutdown() is called from another thread.
  void serve();
  // Wakes serve(), which then closes every connection. Safe to call from a signal handler.
  void shutdown();
  std::size_t active_connections() const;

  static constexpr std::size_t kMaxLineBytes = 1 << 22;

 private:
  struct Connection {
    int fd = -1;
    std::thread worker;
    std::atomic<bool> finished{false};
  };
  void handle(Connection& c);
  void reap(bool all);

  std::shared_ptr<const ScenarioSet> scenarios_;
  EnvConfig cfg_;
  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  mutable std::mutex mu_;
  std::list<Connection> connections_;
};

// Blocking client for one connection; used by tests and tools.
class LineClient {
 public:
  LineClient(const std::string& host, std::uint16_t port);
  ~LineClient();
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;

  void send_line(std::string_view line);
  // Empty optional on EOF.
  std::optional<std::string> read_line();
  std::optional<std::string> request(std::string_view line);
  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace drivesim
