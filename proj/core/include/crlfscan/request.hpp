#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "crlfscan/bytes.hpp"
#include "crlfscan/target.hpp"

namespace crlfscan {

enum class PointKind {
  QueryValue,  // replace the value of query_pairs[index]
  QueryName,   // replace the name of query_pairs[index]
  PathSuffix,  // append to the end of the path
  Header,      // replace the value of the request header named header_name
};

std::string_view to_string(PointKind kind);

enum class SpliceMode { Replace, Append };

/// Where a probe's payload lands in the outgoing request. index is only
/// meaningful for the query kinds; header_name only for Header.
struct InjectionPoint {
  PointKind kind = PointKind::QueryValue;
  std::size_t index = 0;
  std::string header_name;
  SpliceMode mode = SpliceMode::Replace;

  std::string label() const;  // e.g. "query-value[0]", "header[User-Agent]"
};

/// A fully serialized probe. payload_offset/length locate the payload bytes
/// inside `bytes`; the slice is byte-identical to what was spliced in.
struct SerializedRequest {
  Bytes bytes;
  std::size_t payload_offset = 0;
  std::size_t payload_length = 0;
};

/// The request target with `payload` spliced at `point`, every other byte as
/// Target::request_target() produces it. Header points leave it untouched.
Bytes spliced_request_target(const Target& target, const InjectionPoint& point,
                             const Bytes& payload);

/// Builds the raw GET request for a probe. The payload is inserted verbatim:
/// no escaping, no normalization, CR/LF octets included. Everything around it
/// matches serialize_baseline() for the same target.
SerializedRequest serialize_probe(const Target& target,
                                  const InjectionPoint& point,
                                  const Bytes& payload);

/// The no-injection control request used to learn an endpoint's normal head.
Bytes serialize_baseline(const Target& target);

}  // namespace crlfscan
