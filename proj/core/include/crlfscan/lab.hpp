#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "crlfscan/bytes.hpp"

namespace crlfscan {

/// What an endpoint does with the query parameter q (after exactly one
/// percent-decoding pass). The two vuln-* behaviors write attacker bytes
/// into the response head; the rest are safe by construction.
enum class LabBehavior {
  VulnHeader,    // X-Echo: <decoded q> straight into the head
  VulnSplit,     // decoded q dropped raw between head fragments
  BodyEcho,      // decoded q in the body only, fixed head
  ValueReflect,  // decoded q in a header value with CR/LF stripped
  Sanitized,     // decoded q CR/LF-stripped, body only
};

std::string_view to_string(LabBehavior behavior);
std::optional<LabBehavior> parse_lab_behavior(std::string_view name);

struct LabEndpoint {
  std::string path;
  LabBehavior behavior = LabBehavior::Sanitized;
  // Fixed extra header lines (name, value) added to every response; lets
  // tests fake pre-existing junk such as a stale canary from an old scan.
  std::vector<std::pair<std::string, std::string>> extra_headers;
};

struct LabSpec {
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  std::vector<LabEndpoint> endpoints;

  struct SeedLayout {
    std::size_t n_total = 0;
    std::set<std::size_t> vulnerable_indices;
  };
  std::optional<SeedLayout> seed_layout;

  /// endpoints plus the generated /e0../e(n-1) from seed_layout: vulnerable
  /// indices get vuln-header, the k-th remaining endpoint cycles through
  /// {sanitized, body-echo, value-reflect}.
  std::vector<LabEndpoint> materialized() const;
};

/// The desk-scale stand-in for the 40-site experiment: 40 endpoints, the
/// three at indices 4, 17 and 31 vulnerable. Frozen so runs are reproducible.
LabSpec lab_fig4_layout();

/// One endpoint per behavior, each at the path named after it
/// ("/vuln-header", "/vuln-split", "/body-echo", "/value-reflect",
/// "/sanitized"). What `lab` serves when --fig4 is not given.
LabSpec default_lab_spec();

/// Everything the lab sends for one request, as a pure function of
/// (endpoint, request target). Exposed so tests can fuzz behaviors without
/// sockets. Picks the first q parameter, percent-decodes it once, renders.
Bytes lab_response(const LabEndpoint& endpoint, const Bytes& request_target);

/// Raw value of the first `q` parameter in a request target ("" if absent).
Bytes lab_extract_q(const Bytes& request_target);

/// Minimal threaded HTTP/1.1 server over the materialized endpoints, bound
/// to 127.0.0.1 only. One response per connection, then close. Unknown paths
/// get 404, unparseable request lines 400.
class LabServer {
 public:
  explicit LabServer(LabSpec spec);
  ~LabServer();

  LabServer(const LabServer&) = delete;
  LabServer& operator=(const LabServer&) = delete;

  void start();  // throws std::runtime_error when the port is taken
  void stop();   // idempotent; waits for in-flight connections

  std::uint16_t port() const { return port_; }
  std::string origin() const;  // "http://127.0.0.1:<port>"

 private:
  void accept_loop();
  void handle_connection(int fd);

  LabSpec spec_;
  std::vector<LabEndpoint> endpoints_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread acceptor_;
  std::atomic<bool> stopping_{false};
  std::mutex active_mu_;
  std::condition_variable active_cv_;
  std::size_t active_ = 0;
};

}  // namespace crlfscan
