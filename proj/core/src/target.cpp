#include "crlfscan/target.hpp"

namespace crlfscan {

Bytes Target::path() const {
  Bytes out = "/";
  for (std::size_t i = 0; i < path_segments.size(); ++i) {
    if (i) out.push_back('/');
    out += path_segments[i];
  }
  return out;
}

Bytes Target::query_string() const {
  Bytes out;
  for (std::size_t i = 0; i < query_pairs.size(); ++i) {
    if (i) out.push_back('&');
    out += query_pairs[i].name;
    if (query_pairs[i].has_eq) {
      out.push_back('=');
      out += query_pairs[i].value;
    }
  }
  return out;
}

Bytes Target::request_target() const {
  Bytes out = path();
  if (has_query) {
    out.push_back('?');
    out += query_string();
  }
  return out;
}

bool Target::default_port() const {
  return (scheme == "https" && port == 443) || (scheme == "http" && port == 80);
}

std::string Target::host_port() const {
  std::string h = ipv6_literal ? "[" + host + "]" : host;
  if (!default_port()) h += ":" + std::to_string(port);
  return h;
}

std::string Target::origin() const { return scheme + "://" + host_port(); }

namespace {

[[noreturn]] void fail(const std::string& url, const std::string& why) {
  throw TargetParseError("bad target '" + url + "': " + why);
}

}  // namespace

Target parse_target(std::string_view url) {
  std::string raw(url);
  for (unsigned char c : raw)
    if (c < 0x20 || c == 0x7f || c == ' ')
      fail(raw, "control octet or space in URL");

  auto scheme_end = raw.find("://");
  if (scheme_end == std::string::npos) fail(raw, "missing scheme://");
  Target t;
  t.raw_url = raw;
  t.scheme = to_lower_ascii(raw.substr(0, scheme_end));
  if (t.scheme != "http" && t.scheme != "https")
    fail(raw, "unsupported scheme '" + t.scheme + "'");

  std::size_t auth_begin = scheme_end + 3;
  std::size_t auth_end = raw.find_first_of("/?", auth_begin);
  if (auth_end == std::string::npos) auth_end = raw.size();
  std::string authority = raw.substr(auth_begin, auth_end - auth_begin);
  if (authority.find('@') != std::string::npos)
    fail(raw, "userinfo is not supported");

  std::string host_part;
  std::string port_part;
  if (!authority.empty() && authority.front() == '[') {
    auto close = authority.find(']');
    if (close == std::string::npos) fail(raw, "unterminated IPv6 literal");
    host_part = authority.substr(1, close - 1);
    t.ipv6_literal = true;
    std::string rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') fail(raw, "junk after IPv6 literal");
      port_part = rest.substr(1);
    }
  } else {
    auto colon = authority.rfind(':');
    if (colon == std::string::npos) {
      host_part = authority;
    } else {
      host_part = authority.substr(0, colon);
      port_part = authority.substr(colon + 1);
    }
  }
  if (host_part.empty()) fail(raw, "empty host");
  t.host = to_lower_ascii(host_part);

  if (port_part.empty()) {
    t.port = (t.scheme == "https") ? 443 : 80;
  } else {
    unsigned long v = 0;
    for (char c : port_part) {
      if (c < '0' || c > '9') fail(raw, "non-numeric port");
      v = v * 10 + static_cast<unsigned long>(c - '0');
      if (v > 65535) fail(raw, "port out of range");
    }
    if (v == 0) fail(raw, "port out of range");
    t.port = static_cast<std::uint16_t>(v);
  }

  std::string tail = raw.substr(auth_end);
  std::string path_part;
  std::string query_part;
  bool saw_query = false;
  auto qmark = tail.find('?');
  if (qmark == std::string::npos) {
    path_part = tail;
  } else {
    path_part = tail.substr(0, qmark);
    query_part = tail.substr(qmark + 1);
    saw_query = true;
  }

  if (!path_part.empty()) {
    // path_part always starts with '/' here; split the remainder.
    std::string rest = path_part.substr(1);
    std::size_t start = 0;
    while (true) {
      auto slash = rest.find('/', start);
      if (slash == std::string::npos) {
        t.path_segments.push_back(rest.substr(start));
        break;
      }
      t.path_segments.push_back(rest.substr(start, slash - start));
      start = slash + 1;
    }
  }

  t.has_query = saw_query;
  if (saw_query && !query_part.empty()) {
    std::size_t start = 0;
    while (true) {
      auto amp = query_part.find('&', start);
      std::string piece = (amp == std::string::npos)
                              ? query_part.substr(start)
                              : query_part.substr(start, amp - start);
      QueryPair qp;
      auto eq = piece.find('=');
      if (eq == std::string::npos) {
        qp.name = piece;
      } else {
        qp.name = piece.substr(0, eq);
        qp.value = piece.substr(eq + 1);
        qp.has_eq = true;
      }
      t.query_pairs.push_back(std::move(qp));
      if (amp == std::string::npos) break;
      start = amp + 1;
    }
  }

  return t;
}

}  // namespace crlfscan
