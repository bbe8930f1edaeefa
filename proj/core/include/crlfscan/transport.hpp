#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "crlfscan/bytes.hpp"
#include "crlfscan/target.hpp"

namespace crlfscan {

struct ConnectionOptions {
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{10000};
  std::size_t max_response_bytes = 80 * 1024;  // head cap + body cap
  bool tls_verify = true;
  int retries_on_timeout = 1;  // applied by send_probe, not send_raw
};

class TransportError : public std::runtime_error {
 public:
  enum class Kind {
    Resolve,
    ConnectTimeout,
    ConnectionRefused,
    TlsHandshake,
    ReadTimeout,  // no response byte arrived in time
    Io,
  };

  TransportError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(TransportError::Kind kind);

/// Process-wide SIGPIPE suppression; safe to call repeatedly. Peers that
/// close mid-write must surface as errors, not kill the scanner.
void ignore_sigpipe();

/// One exchange: connect, send every request byte untouched, read until EOF,
/// the byte cap, or the read timeout. Returns whatever arrived (possibly a
/// partial response); throws TransportError only when nothing useful did.
/// sni_host also drives TLS certificate-name checking.
Bytes send_raw(const std::string& host, std::uint16_t port, bool tls,
               const std::string& sni_host, const Bytes& request,
               const ConnectionOptions& opts);

/// send_raw against the target's origin, retrying timeouts per
/// opts.retries_on_timeout.
Bytes exchange(const Target& target, const Bytes& request,
               const ConnectionOptions& opts);

}  // namespace crlfscan
