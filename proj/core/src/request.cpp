#include "crlfscan/request.hpp"

#include <stdexcept>

#include "crlfscan/version.hpp"

namespace crlfscan {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::QueryValue: return "query-value";
    case PointKind::QueryName: return "query-name";
    case PointKind::PathSuffix: return "path-suffix";
    case PointKind::Header: return "header";
  }
  return "unknown";
}

std::string InjectionPoint::label() const {
  switch (kind) {
    case PointKind::QueryValue:
    case PointKind::QueryName:
      return std::string(to_string(kind)) + "[" + std::to_string(index) + "]";
    case PointKind::PathSuffix:
      return "path-suffix";
    case PointKind::Header:
      return "header[" + header_name + "]";
  }
  return "unknown";
}

namespace {

Bytes render_pair(const QueryPair& qp) {
  Bytes out = qp.name;
  if (qp.has_eq) {
    out.push_back('=');
    out += qp.value;
  }
  return out;
}

// The request target split around the splice position: target = before+payload+after.
struct TargetSplice {
  Bytes before;
  Bytes after;
};

TargetSplice splice_parts(const Target& target, const InjectionPoint& point) {
  TargetSplice s;
  switch (point.kind) {
    case PointKind::PathSuffix:
      // "/p" grows a new trailing segment; "/p/" reuses its empty one.
      s.before = target.path();
      if (s.before.back() != '/') s.before.push_back('/');
      if (target.has_query) {
        s.after.push_back('?');
        s.after += target.query_string();
      }
      return s;
    case PointKind::QueryValue:
    case PointKind::QueryName: {
      if (!target.has_query || point.index >= target.query_pairs.size())
        throw std::out_of_range("query injection point out of range");
      s.before = target.path();
      s.before.push_back('?');
      for (std::size_t i = 0; i < point.index; ++i) {
        s.before += render_pair(target.query_pairs[i]);
        s.before.push_back('&');
      }
      const QueryPair& qp = target.query_pairs[point.index];
      if (point.kind == PointKind::QueryValue) {
        // Replacing a value forces name=payload even for bare "?flag".
        s.before += qp.name;
        s.before.push_back('=');
      } else {
        if (qp.has_eq) {
          s.after.push_back('=');
          s.after += qp.value;
        }
      }
      for (std::size_t i = point.index + 1; i < target.query_pairs.size(); ++i) {
        s.after.push_back('&');
        s.after += render_pair(target.query_pairs[i]);
      }
      return s;
    }
    case PointKind::Header:
      s.before = target.request_target();
      return s;  // header splices do not touch the target
  }
  throw std::logic_error("unhandled point kind");
}

Bytes header_block(const Target& target) {
  Bytes out;
  out += "Host: " + target.host_port() + "\r\n";
  out += "User-Agent: ";
  out += kUserAgent;
  out += "\r\n";
  out += "Accept: */*\r\n";
  out += "Connection: close\r\n\r\n";
  return out;
}

}  // namespace

Bytes spliced_request_target(const Target& target, const InjectionPoint& point,
                             const Bytes& payload) {
  if (point.kind == PointKind::Header) return target.request_target();
  TargetSplice s = splice_parts(target, point);
  return s.before + payload + s.after;
}

SerializedRequest serialize_probe(const Target& target,
                                  const InjectionPoint& point,
                                  const Bytes& payload) {
  SerializedRequest req;
  if (point.kind == PointKind::Header) {
    Bytes head = "GET " + target.request_target() + " HTTP/1.1\r\n";
    if (iequals_ascii(point.header_name, "user-agent")) {
      head += "Host: " + target.host_port() + "\r\nUser-Agent: ";
      req.payload_offset = head.size();
      head += payload;
      head += "\r\nAccept: */*\r\nConnection: close\r\n\r\n";
    } else {
      head += "Host: " + target.host_port() + "\r\nUser-Agent: ";
      head += kUserAgent;
      head += "\r\nAccept: */*\r\n";
      head += point.header_name + ": ";
      req.payload_offset = head.size();
      head += payload;
      head += "\r\nConnection: close\r\n\r\n";
    }
    req.bytes = std::move(head);
  } else {
    TargetSplice s = splice_parts(target, point);
    Bytes head = "GET " + s.before;
    req.payload_offset = head.size();
    head += payload;
    head += s.after;
    head += " HTTP/1.1\r\n";
    head += header_block(target);
    req.bytes = std::move(head);
  }
  req.payload_length = payload.size();
  return req;
}

Bytes serialize_baseline(const Target& target) {
  Bytes out = "GET " + target.request_target() + " HTTP/1.1\r\n";
  out += header_block(target);
  return out;
}

}  // namespace crlfscan
