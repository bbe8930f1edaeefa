#pragma once

#include <string>
#include <string_view>

namespace crlfscan {

// Raw octet sequences are carried as std::string throughout; HTTP wire data
// is bytes, not text, so no encoding assumptions are made anywhere.
using Bytes = std::string;

inline constexpr char kCr = '\r';  // octet 13
inline constexpr char kLf = '\n';  // octet 10

/// One percent-decoding pass: "%0d" -> octet 13. Invalid or truncated escapes
/// are copied through verbatim. '+' is never treated as a space.
Bytes percent_decode(std::string_view in);

std::string to_lower_ascii(std::string_view s);

bool iequals_ascii(std::string_view a, std::string_view b);

/// Case-insensitive substring search (ASCII folding only).
bool icontains_ascii(std::string_view haystack, std::string_view needle);

inline bool contains_cr_or_lf(std::string_view s) {
  return s.find(kCr) != std::string_view::npos || s.find(kLf) != std::string_view::npos;
}

/// Drops every CR and LF octet, keeping everything else.
Bytes strip_cr_lf(std::string_view s);

/// Printable rendering for logs and --list-payloads: CR/LF as \r \n, other
/// non-printables as \xNN.
std::string escape_control(std::string_view s);

}  // namespace crlfscan
