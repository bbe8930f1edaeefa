#include "crlfscan/response.hpp"

#include <cctype>

namespace crlfscan {

const HeaderField* ResponseHead::find_header(std::string_view name) const {
  for (const auto& h : headers)
    if (iequals_ascii(h.name, name)) return &h;
  return nullptr;
}

namespace {

bool is_tchar(unsigned char c) {
  if (std::isalnum(c)) return true;
  switch (c) {
    case '!': case '#': case '$': case '%': case '&': case '\'': case '*':
    case '+': case '-': case '.': case '^': case '_': case '`': case '|':
    case '~':
      return true;
    default:
      return false;
  }
}

bool valid_token(const Bytes& s) {
  if (s.empty()) return false;
  for (unsigned char c : s)
    if (!is_tchar(c)) return false;
  return true;
}

Bytes trim_sp_ht(const Bytes& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

// Parses "HTTP/<ver> <3 digits>[ <reason>]". Returns false on shape mismatch.
bool parse_status_line(const Bytes& line, std::string* version, int* status,
                       std::string* reason) {
  constexpr std::string_view prefix = "HTTP/";
  if (line.size() < prefix.size() + 1 || line.compare(0, prefix.size(), prefix) != 0)
    return false;
  std::size_t i = prefix.size();
  std::size_t ver_begin = i;
  bool saw_digit = false;
  while (i < line.size() && (std::isdigit(static_cast<unsigned char>(line[i])) ||
                             line[i] == '.')) {
    if (std::isdigit(static_cast<unsigned char>(line[i]))) saw_digit = true;
    ++i;
  }
  if (!saw_digit || i == line.size() || line[i] != ' ') return false;
  std::size_t ver_end = i;
  ++i;
  if (i + 3 > line.size()) return false;
  int code = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!std::isdigit(static_cast<unsigned char>(line[i + k]))) return false;
    code = code * 10 + (line[i + k] - '0');
  }
  i += 3;
  if (i < line.size() && line[i] != ' ') return false;
  if (version) *version = "HTTP/" + line.substr(ver_begin, ver_end - ver_begin);
  if (status) *status = code;
  if (reason) *reason = (i < line.size()) ? line.substr(i + 1) : Bytes();
  return true;
}

}  // namespace

bool looks_like_status_line(const Bytes& line) {
  return parse_status_line(line, nullptr, nullptr, nullptr);
}

ResponseHead parse_response_head(const Bytes& raw) {
  // First line: everything before the first LF, minus one trailing CR.
  auto first_lf = raw.find('\n');
  if (first_lf == Bytes::npos)
    throw ResponseParseError(ResponseParseError::Kind::Truncated,
                             "response ends before the first line break");
  Bytes status_line = raw.substr(0, first_lf);
  if (!status_line.empty() && status_line.back() == '\r') status_line.pop_back();

  ResponseHead head;
  if (!parse_status_line(status_line, &head.version, &head.status_code,
                         &head.reason))
    throw ResponseParseError(ResponseParseError::Kind::NotHttp,
                             "first line is not an HTTP status line: " +
                                 escape_control(status_line));
  if (head.status_code < 100 || head.status_code > 599)
    throw ResponseParseError(ResponseParseError::Kind::NotHttp,
                             "status code out of range: " +
                                 std::to_string(head.status_code));

  std::size_t pos = first_lf + 1;
  std::size_t line_index = 0;
  bool terminated = false;
  while (pos <= raw.size()) {
    auto lf = raw.find('\n', pos);
    if (lf == Bytes::npos) {
      // Head ran off the end of the input; keep the partial line.
      if (pos < raw.size()) {
        Bytes line = raw.substr(pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty())
          head.malformed_lines.push_back({line, line_index++});
      }
      head.truncated = true;
      return head;
    }
    Bytes line = raw.substr(pos, lf - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = lf + 1;
    if (line.empty()) {  // blank line: head is complete
      terminated = true;
      break;
    }

    int embedded_code = 0;
    if (parse_status_line(line, nullptr, &embedded_code, nullptr)) {
      head.embedded_status_lines.push_back({line, embedded_code, line_index++});
      continue;
    }
    auto colon = line.find(':');
    Bytes name = (colon == Bytes::npos) ? Bytes() : line.substr(0, colon);
    if (colon != Bytes::npos && valid_token(name)) {
      HeaderField f;
      f.name = name;
      f.value = trim_sp_ht(line.substr(colon + 1));
      f.raw = line;
      f.line_index = line_index++;
      head.headers.push_back(std::move(f));
    } else {
      head.malformed_lines.push_back({line, line_index++});
    }
  }

  if (terminated) head.body_prefix = raw.substr(pos);
  head.truncated = !terminated;
  return head;
}

}  // namespace crlfscan
