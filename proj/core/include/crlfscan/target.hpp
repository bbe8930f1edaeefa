#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crlfscan/bytes.hpp"

namespace crlfscan {

/// One piece of the query string, kept raw (still percent-encoded). has_eq
/// distinguishes "?flag" from "?flag=" so rendering round-trips byte-exactly.
struct QueryPair {
  Bytes name;
  Bytes value;
  bool has_eq = false;
};

class TargetParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed scan target. Path and query are stored as the raw bytes that
/// appeared in the URL; request_target() reproduces them unchanged, except
/// that an absent path renders as "/".
struct Target {
  std::string scheme;  // "http" or "https", lowercase
  std::string host;    // lowercase; IPv6 literals stored without brackets
  bool ipv6_literal = false;
  std::uint16_t port = 0;
  std::vector<Bytes> path_segments;  // "/a//b" -> {"a","","b"}
  std::vector<QueryPair> query_pairs;
  bool has_query = false;  // '?' was present, even with nothing after it
  std::string raw_url;

  Bytes path() const;
  Bytes query_string() const;   // without the leading '?'
  Bytes request_target() const; // path [+ '?' + query]
  std::string host_port() const;  // omits the scheme-default port
  std::string origin() const;     // scheme://host_port()
  bool default_port() const;
};

/// Accepts absolute http/https URLs. Rejects userinfo, control octets and
/// spaces, empty hosts, and out-of-range ports. Throws TargetParseError.
Target parse_target(std::string_view url);

}  // namespace crlfscan
