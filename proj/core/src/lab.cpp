#include "crlfscan/lab.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "crlfscan/transport.hpp"

namespace crlfscan {

std::string_view to_string(LabBehavior behavior) {
  switch (behavior) {
    case LabBehavior::VulnHeader: return "vuln-header";
    case LabBehavior::VulnSplit: return "vuln-split";
    case LabBehavior::BodyEcho: return "body-echo";
    case LabBehavior::ValueReflect: return "value-reflect";
    case LabBehavior::Sanitized: return "sanitized";
  }
  return "unknown";
}

std::optional<LabBehavior> parse_lab_behavior(std::string_view name) {
  if (name == "vuln-header") return LabBehavior::VulnHeader;
  if (name == "vuln-split") return LabBehavior::VulnSplit;
  if (name == "body-echo") return LabBehavior::BodyEcho;
  if (name == "value-reflect") return LabBehavior::ValueReflect;
  if (name == "sanitized") return LabBehavior::Sanitized;
  return std::nullopt;
}

std::vector<LabEndpoint> LabSpec::materialized() const {
  std::vector<LabEndpoint> all = endpoints;
  if (seed_layout) {
    static const LabBehavior cycle[] = {LabBehavior::Sanitized,
                                        LabBehavior::BodyEcho,
                                        LabBehavior::ValueReflect};
    std::size_t safe_seen = 0;
    for (std::size_t i = 0; i < seed_layout->n_total; ++i) {
      LabEndpoint ep;
      ep.path = "/e" + std::to_string(i);
      if (seed_layout->vulnerable_indices.count(i)) {
        ep.behavior = LabBehavior::VulnHeader;
      } else {
        ep.behavior = cycle[safe_seen % 3];
        ++safe_seen;
      }
      all.push_back(std::move(ep));
    }
  }
  return all;
}

LabSpec lab_fig4_layout() {
  LabSpec spec;
  spec.seed_layout = LabSpec::SeedLayout{40, {4, 17, 31}};
  return spec;
}

LabSpec default_lab_spec() {
  LabSpec spec;
  for (LabBehavior b : {LabBehavior::VulnHeader, LabBehavior::VulnSplit,
                        LabBehavior::BodyEcho, LabBehavior::ValueReflect,
                        LabBehavior::Sanitized})
    spec.endpoints.push_back({"/" + std::string(to_string(b)), b, {}});
  return spec;
}

Bytes lab_extract_q(const Bytes& request_target) {
  auto qmark = request_target.find('?');
  if (qmark == Bytes::npos) return {};
  Bytes query = request_target.substr(qmark + 1);
  std::size_t start = 0;
  while (start <= query.size()) {
    auto amp = query.find('&', start);
    Bytes piece = (amp == Bytes::npos) ? query.substr(start)
                                       : query.substr(start, amp - start);
    if (piece == "q") return {};
    if (piece.rfind("q=", 0) == 0) return piece.substr(2);
    if (amp == Bytes::npos) break;
    start = amp + 1;
  }
  return {};
}

namespace {

Bytes extra_header_lines(const LabEndpoint& ep) {
  Bytes out;
  for (const auto& [name, value] : ep.extra_headers)
    out += name + ": " + value + "\r\n";
  return out;
}

}  // namespace

Bytes lab_response(const LabEndpoint& endpoint, const Bytes& request_target) {
  Bytes decoded = percent_decode(lab_extract_q(request_target));
  Bytes extra = extra_header_lines(endpoint);
  switch (endpoint.behavior) {
    case LabBehavior::VulnHeader:
      return "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n" + extra +
             "X-Echo: " + decoded + "\r\nConnection: close\r\n\r\nok\n";
    case LabBehavior::VulnSplit:
      return "HTTP/1.1 200 OK\r\n" + extra + "X-Pre: 1\r\n" + decoded +
             "\r\n\r\nok";
    case LabBehavior::BodyEcho:
      return "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n" + extra +
             "Connection: close\r\n\r\nyou said: " + decoded + "\n";
    case LabBehavior::ValueReflect:
      return "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n" + extra +
             "X-Echo: " + strip_cr_lf(decoded) +
             "\r\nConnection: close\r\n\r\nok\n";
    case LabBehavior::Sanitized:
      return "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n" + extra +
             "Connection: close\r\n\r\n" + strip_cr_lf(decoded) + "\n";
  }
  return "HTTP/1.1 500 Internal Server Error\r\nConnection: close\r\n\r\n";
}

namespace {

constexpr std::size_t kMaxRequestBytes = 32 * 1024;
constexpr int kRequestTimeoutMs = 5000;

const Bytes kNotFound =
    "HTTP/1.1 404 Not Found\r\nContent-Type: text/plain\r\n"
    "Connection: close\r\n\r\nnot found\n";
const Bytes kBadRequest =
    "HTTP/1.1 400 Bad Request\r\nContent-Type: text/plain\r\n"
    "Connection: close\r\n\r\nbad request\n";

void send_everything(int fd, const Bytes& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t rc = ::send(fd, data.data() + sent, data.size() - sent,
                        MSG_NOSIGNAL);
    if (rc > 0) {
      sent += static_cast<std::size_t>(rc);
      continue;
    }
    if (rc < 0 && errno == EINTR) continue;
    return;  // peer went away; nothing sensible to do
  }
}

// Reads until the head terminator, the size cap, or the timeout.
Bytes read_request_head(int fd) {
  Bytes buf;
  char chunk[4096];
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(kRequestTimeoutMs);
  while (buf.size() < kMaxRequestBytes) {
    if (buf.find("\r\n\r\n") != Bytes::npos || buf.find("\n\n") != Bytes::npos)
      break;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) break;
    pollfd pfd{fd, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc == 0) break;
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
  }
  return buf;
}

}  // namespace

LabServer::LabServer(LabSpec spec)
    : spec_(std::move(spec)), endpoints_(spec_.materialized()) {}

LabServer::~LabServer() { stop(); }

std::string LabServer::origin() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

void LabServer::start() {
  ignore_sigpipe();
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0)
    throw std::runtime_error(std::string("lab: socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(spec_.port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error(std::string("lab: cannot bind port ") +
                             std::to_string(spec_.port) + ": " +
                             std::strerror(err));
  }
  if (::listen(listen_fd_, 128) != 0) {
    int err = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error(std::string("lab: listen: ") + std::strerror(err));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);

  stopping_ = false;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void LabServer::stop() {
  if (listen_fd_ < 0 && !acceptor_.joinable()) return;
  stopping_ = true;
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::unique_lock<std::mutex> lock(active_mu_);
  active_cv_.wait(lock, [this] { return active_ == 0; });
}

void LabServer::accept_loop() {
  while (!stopping_) {
    int client = ::accept(listen_fd_, nullptr, nullptr);
    if (client < 0) {
      if (errno == EINTR) continue;
      return;  // listen socket closed by stop()
    }
    {
      std::lock_guard<std::mutex> lock(active_mu_);
      ++active_;
    }
    std::thread([this, client] {
      handle_connection(client);
      ::close(client);
      {
        std::lock_guard<std::mutex> lock(active_mu_);
        --active_;
      }
      active_cv_.notify_all();
    }).detach();
  }
}

void LabServer::handle_connection(int fd) {
  Bytes head = read_request_head(fd);
  auto line_end = head.find('\n');
  if (line_end == Bytes::npos) {
    send_everything(fd, kBadRequest);
    return;
  }
  Bytes line = head.substr(0, line_end);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  // METHOD SP TARGET SP HTTP/x — anything else is a 400.
  auto sp1 = line.find(' ');
  auto sp2 = (sp1 == Bytes::npos) ? Bytes::npos : line.rfind(' ');
  if (sp1 == Bytes::npos || sp2 == sp1 ||
      line.compare(sp2 + 1, 5, "HTTP/") != 0) {
    send_everything(fd, kBadRequest);
    return;
  }
  Bytes target = line.substr(sp1 + 1, sp2 - sp1 - 1);
  Bytes path = target.substr(0, target.find('?'));

  for (const auto& ep : endpoints_) {
    if (ep.path == path) {
      send_everything(fd, lab_response(ep, target));
      return;
    }
  }
  send_everything(fd, kNotFound);
}

}  // namespace crlfscan
