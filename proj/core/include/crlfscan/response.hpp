#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "crlfscan/bytes.hpp"

namespace crlfscan {

/// One syntactically valid header line. `raw` is the full line without its
/// terminator; line_index counts head lines after the status line (0-based,
/// shared across all three buckets so their relative order is recoverable).
struct HeaderField {
  Bytes name;   // token as sent; callers compare case-insensitively
  Bytes value;  // SP/HT trimmed at both ends; interior bytes (even CR) kept
  Bytes raw;
  std::size_t line_index = 0;
};

/// A head line shaped like a status line ("HTTP/x.y NNN ..."). Seeing one
/// after the real status line is the signature of a split response.
struct EmbeddedStatusLine {
  Bytes raw;
  int status_code = 0;
  std::size_t line_index = 0;
};

/// A non-empty head line that is neither header-shaped nor status-shaped.
struct MalformedLine {
  Bytes raw;
  std::size_t line_index = 0;
};

struct ResponseHead {
  std::string version;  // e.g. "HTTP/1.1"
  int status_code = 0;
  std::string reason;
  std::vector<HeaderField> headers;
  std::vector<MalformedLine> malformed_lines;
  std::vector<EmbeddedStatusLine> embedded_status_lines;
  Bytes body_prefix;      // bytes after the head terminator, as given
  bool truncated = false; // input ended before the blank line

  const HeaderField* find_header(std::string_view name) const;  // first match
};

class ResponseParseError : public std::runtime_error {
 public:
  enum class Kind {
    NotHttp,    // first line is not an HTTP status line
    Truncated,  // input ends before even one complete line
  };

  ResponseParseError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// True for "HTTP/<digits[.digits]> <3 digits>" followed by end or space.
bool looks_like_status_line(const Bytes& line);

/// Tolerant head parser. Lines split on LF with one trailing CR stripped, so
/// bare-LF responses parse; a lone CR inside a line is kept as data. Every
/// non-empty head line lands in exactly one of headers / embedded_status_lines
/// / malformed_lines. Folded (obs-fold) continuations are treated as
/// malformed. Throws ResponseParseError; never throws once a valid status
/// line has been read.
ResponseHead parse_response_head(const Bytes& raw);

}  // namespace crlfscan
