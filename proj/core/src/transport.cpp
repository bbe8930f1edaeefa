#include "crlfscan/transport.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509v3.h>

namespace crlfscan {

std::string_view to_string(TransportError::Kind kind) {
  switch (kind) {
    case TransportError::Kind::Resolve: return "resolve";
    case TransportError::Kind::ConnectTimeout: return "connect-timeout";
    case TransportError::Kind::ConnectionRefused: return "connection-refused";
    case TransportError::Kind::TlsHandshake: return "tls-handshake";
    case TransportError::Kind::ReadTimeout: return "read-timeout";
    case TransportError::Kind::Io: return "io";
  }
  return "unknown";
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

namespace {

using Kind = TransportError::Kind;
using Clock = std::chrono::steady_clock;

[[noreturn]] void bail(Kind kind, const std::string& where,
                       const std::string& detail) {
  throw TransportError(kind, where + ": " + detail);
}

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

// poll() one fd for `events`; false on timeout, throws on poll failure.
bool wait_fd(int fd, short events, Clock::time_point deadline,
             const std::string& where) {
  pollfd pfd{fd, events, 0};
  while (true) {
    int ms = remaining_ms(deadline);
    int rc = ::poll(&pfd, 1, ms);
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno == EINTR) continue;
    bail(Kind::Io, where, std::string("poll: ") + std::strerror(errno));
  }
}

int connect_one(const addrinfo* ai, const std::string& where,
                std::chrono::milliseconds timeout, Kind* fail_kind,
                std::string* fail_msg) {
  Fd sock;
  sock.fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK,
                     ai->ai_protocol);
  if (sock.fd < 0) {
    *fail_kind = Kind::Io;
    *fail_msg = std::string("socket: ") + std::strerror(errno);
    return -1;
  }
  int rc = ::connect(sock.fd, ai->ai_addr, ai->ai_addrlen);
  if (rc != 0 && errno != EINPROGRESS) {
    *fail_kind = errno == ECONNREFUSED ? Kind::ConnectionRefused : Kind::Io;
    *fail_msg = std::string("connect: ") + std::strerror(errno);
    return -1;
  }
  if (rc != 0) {
    auto deadline = Clock::now() + timeout;
    if (!wait_fd(sock.fd, POLLOUT, deadline, where)) {
      *fail_kind = Kind::ConnectTimeout;
      *fail_msg = "connect timed out";
      return -1;
    }
    int err = 0;
    socklen_t len = sizeof(err);
    if (::getsockopt(sock.fd, SOL_SOCKET, SO_ERROR, &err, &len) != 0 || err != 0) {
      *fail_kind = err == ECONNREFUSED ? Kind::ConnectionRefused : Kind::Io;
      *fail_msg = std::string("connect: ") + std::strerror(err ? err : errno);
      return -1;
    }
  }
  int fd = sock.fd;
  sock.fd = -1;
  return fd;
}

struct TlsSession {
  SSL_CTX* ctx = nullptr;
  SSL* ssl = nullptr;
  ~TlsSession() {
    if (ssl) SSL_free(ssl);
    if (ctx) SSL_CTX_free(ctx);
  }
};

std::string tls_error_text() {
  unsigned long code = ERR_get_error();
  if (code == 0) return "unknown TLS error";
  char buf[256];
  ERR_error_string_n(code, buf, sizeof(buf));
  ERR_clear_error();
  return buf;
}

void tls_handshake(TlsSession& tls, int fd, const std::string& sni_host,
                   bool verify, Clock::time_point deadline,
                   const std::string& where) {
  tls.ctx = SSL_CTX_new(TLS_client_method());
  if (!tls.ctx) bail(Kind::TlsHandshake, where, tls_error_text());
  SSL_CTX_set_verify(tls.ctx, verify ? SSL_VERIFY_PEER : SSL_VERIFY_NONE, nullptr);
  if (verify && SSL_CTX_set_default_verify_paths(tls.ctx) != 1)
    bail(Kind::TlsHandshake, where, "no default trust store");
  tls.ssl = SSL_new(tls.ctx);
  if (!tls.ssl) bail(Kind::TlsHandshake, where, tls_error_text());
  SSL_set_tlsext_host_name(tls.ssl, sni_host.c_str());
  if (verify && SSL_set1_host(tls.ssl, sni_host.c_str()) != 1)
    bail(Kind::TlsHandshake, where, "cannot pin expected hostname");
  if (SSL_set_fd(tls.ssl, fd) != 1)
    bail(Kind::TlsHandshake, where, tls_error_text());

  while (true) {
    int rc = SSL_connect(tls.ssl);
    if (rc == 1) return;
    int err = SSL_get_error(tls.ssl, rc);
    short want = 0;
    if (err == SSL_ERROR_WANT_READ) want = POLLIN;
    else if (err == SSL_ERROR_WANT_WRITE) want = POLLOUT;
    else bail(Kind::TlsHandshake, where, tls_error_text());
    if (!wait_fd(fd, want, deadline, where))
      bail(Kind::TlsHandshake, where, "TLS handshake timed out");
  }
}

void send_all(TlsSession& tls, int fd, const Bytes& data,
              Clock::time_point deadline, const std::string& where) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    if (tls.ssl) {
      int rc = SSL_write(tls.ssl, data.data() + sent,
                         static_cast<int>(data.size() - sent));
      if (rc > 0) {
        sent += static_cast<std::size_t>(rc);
        continue;
      }
      int err = SSL_get_error(tls.ssl, rc);
      short want = err == SSL_ERROR_WANT_WRITE ? POLLOUT
                   : err == SSL_ERROR_WANT_READ ? POLLIN
                                                : 0;
      if (!want) bail(Kind::Io, where, "TLS write: " + tls_error_text());
      if (!wait_fd(fd, want, deadline, where))
        bail(Kind::Io, where, "write timed out");
    } else {
      ssize_t rc = ::send(fd, data.data() + sent, data.size() - sent,
                          MSG_NOSIGNAL);
      if (rc > 0) {
        sent += static_cast<std::size_t>(rc);
        continue;
      }
      if (rc < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
        if (!wait_fd(fd, POLLOUT, deadline, where))
          bail(Kind::Io, where, "write timed out");
        continue;
      }
      if (rc < 0 && errno == EINTR) continue;
      bail(Kind::Io, where, std::string("send: ") + std::strerror(errno));
    }
  }
}

Bytes recv_until_close(TlsSession& tls, int fd, std::size_t cap,
                       Clock::time_point deadline, const std::string& where) {
  Bytes out;
  char buf[8192];
  while (out.size() < cap) {
    std::size_t room = std::min(sizeof(buf), cap - out.size());
    if (tls.ssl) {
      int rc = SSL_read(tls.ssl, buf, static_cast<int>(room));
      if (rc > 0) {
        out.append(buf, static_cast<std::size_t>(rc));
        continue;
      }
      int err = SSL_get_error(tls.ssl, rc);
      if (err == SSL_ERROR_ZERO_RETURN) break;  // clean TLS shutdown
      if (err == SSL_ERROR_WANT_READ || err == SSL_ERROR_WANT_WRITE) {
        short want = err == SSL_ERROR_WANT_READ ? POLLIN : POLLOUT;
        if (!wait_fd(fd, want, deadline, where)) {
          if (out.empty()) bail(Kind::ReadTimeout, where, "no response bytes");
          break;  // partial response; the parser decides what it proves
        }
        continue;
      }
      if (err == SSL_ERROR_SYSCALL && ERR_peek_error() == 0) break;  // abrupt EOF
      if (out.empty()) bail(Kind::Io, where, "TLS read: " + tls_error_text());
      break;
    } else {
      ssize_t rc = ::recv(fd, buf, room, 0);
      if (rc > 0) {
        out.append(buf, static_cast<std::size_t>(rc));
        continue;
      }
      if (rc == 0) break;  // EOF
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        if (!wait_fd(fd, POLLIN, deadline, where)) {
          if (out.empty()) bail(Kind::ReadTimeout, where, "no response bytes");
          break;
        }
        continue;
      }
      if (errno == EINTR) continue;
      if (errno == ECONNRESET && !out.empty()) break;
      bail(Kind::Io, where, std::string("recv: ") + std::strerror(errno));
    }
  }
  return out;
}

}  // namespace

Bytes send_raw(const std::string& host, std::uint16_t port, bool tls,
               const std::string& sni_host, const Bytes& request,
               const ConnectionOptions& opts) {
  ignore_sigpipe();
  const std::string where = host + ":" + std::to_string(port);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  AddrInfo res;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                         &res.head);
  if (rc != 0) bail(Kind::Resolve, where, ::gai_strerror(rc));

  Fd sock;
  Kind fail_kind = Kind::Io;
  std::string fail_msg = "no addresses";
  for (addrinfo* ai = res.head; ai; ai = ai->ai_next) {
    sock.fd = connect_one(ai, where, opts.connect_timeout, &fail_kind, &fail_msg);
    if (sock.fd >= 0) break;
  }
  if (sock.fd < 0) bail(fail_kind, where, fail_msg);
  int yes = 1;
  ::setsockopt(sock.fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof(yes));

  TlsSession session;
  auto deadline = Clock::now() + opts.read_timeout;
  if (tls) tls_handshake(session, sock.fd, sni_host, opts.tls_verify, deadline, where);
  send_all(session, sock.fd, request, deadline, where);
  return recv_until_close(session, sock.fd, opts.max_response_bytes, deadline, where);
}

Bytes exchange(const Target& target, const Bytes& request,
               const ConnectionOptions& opts) {
  int attempts = opts.retries_on_timeout >= 0 ? opts.retries_on_timeout + 1 : 1;
  for (int i = 0;; ++i) {
    try {
      return send_raw(target.host, target.port, target.scheme == "https",
                      target.host, request, opts);
    } catch (const TransportError& e) {
      bool timeout = e.kind() == TransportError::Kind::ConnectTimeout ||
                     e.kind() == TransportError::Kind::ReadTimeout;
      if (!timeout || i + 1 >= attempts) throw;
    }
  }
}

}  // namespace crlfscan
