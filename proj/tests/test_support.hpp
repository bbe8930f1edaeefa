#pragma once

// Scripted loopback TCP server for exercising the transport and engine
// against controlled misbehavior: silent peers, immediate closes, canned
// bytes, oversized responses. Connection i plays script[i] (the last entry
// repeats for any further connections).

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace testsupport {

struct Exchange {
  std::string response;      // "" means close without writing
  bool read_request = true;  // read until CRLFCRLF before acting
  int delay_ms = 0;          // pause before responding
};

class ScriptedServer {
 public:
  explicit ScriptedServer(std::vector<Exchange> script)
      : script_(std::move(script)) {
    if (script_.empty()) script_.push_back({});
  }

  ~ScriptedServer() { stop(); }

  void start() {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error("scripted server: socket");
    int yes = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd_, 64) != 0)
      throw std::runtime_error("scripted server: bind/listen");
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { loop(); });
  }

  void stop() {
    if (fd_ < 0) return;
    stopping_ = true;
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
    if (thread_.joinable()) thread_.join();
  }

  std::uint16_t port() const { return port_; }

  std::string url(const std::string& path_query) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path_query;
  }

  int connections() const { return connections_.load(); }

  std::vector<std::string> received() const {
    std::lock_guard<std::mutex> lock(mu_);
    return received_;
  }

 private:
  void loop() {
    std::size_t idx = 0;
    while (!stopping_) {
      int client = ::accept(fd_, nullptr, nullptr);
      if (client < 0) return;
      connections_.fetch_add(1);
      const Exchange& ex = script_[std::min(idx, script_.size() - 1)];
      ++idx;
      serve_one(client, ex);
      ::close(client);
    }
  }

  void serve_one(int client, const Exchange& ex) {
    if (ex.read_request) {
      std::string buf;
      char chunk[4096];
      while (buf.find("\r\n\r\n") == std::string::npos && buf.size() < 65536) {
        pollfd pfd{client, POLLIN, 0};
        if (::poll(&pfd, 1, 2000) <= 0) break;
        ssize_t n = ::recv(client, chunk, sizeof(chunk), 0);
        if (n <= 0) break;
        buf.append(chunk, static_cast<std::size_t>(n));
      }
      std::lock_guard<std::mutex> lock(mu_);
      received_.push_back(std::move(buf));
    }
    for (int waited = 0; waited < ex.delay_ms && !stopping_; waited += 50)
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (stopping_ || ex.response.empty()) return;
    std::size_t sent = 0;
    while (sent < ex.response.size()) {
      ssize_t n = ::send(client, ex.response.data() + sent,
                         ex.response.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return;
      sent += static_cast<std::size_t>(n);
    }
  }

  std::vector<Exchange> script_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<int> connections_{0};
  mutable std::mutex mu_;
  std::vector<std::string> received_;
};

// A port that nothing is listening on right now.
inline std::uint16_t free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace testsupport
