#include "crlfscan/classify.hpp"

#include <algorithm>

namespace crlfscan {

std::string_view to_string(VerdictClass cls) {
  switch (cls) {
    case VerdictClass::VulnerableResponseSplit: return "vulnerable-response-split";
    case VerdictClass::VulnerableHeaderInjection: return "vulnerable-header-injection";
    case VerdictClass::ReflectedValueOnly: return "reflected-value-only";
    case VerdictClass::ReflectedBodyOnly: return "reflected-body-only";
    case VerdictClass::NotVulnerable: return "not-vulnerable";
    case VerdictClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

int severity_rank(VerdictClass cls) {
  switch (cls) {
    case VerdictClass::VulnerableResponseSplit: return 5;
    case VerdictClass::VulnerableHeaderInjection: return 4;
    case VerdictClass::ReflectedValueOnly: return 3;
    case VerdictClass::ReflectedBodyOnly: return 2;
    case VerdictClass::NotVulnerable: return 1;
    case VerdictClass::Inconclusive: return 0;
  }
  return 0;
}

bool is_vulnerable(VerdictClass cls) {
  return cls == VerdictClass::VulnerableResponseSplit ||
         cls == VerdictClass::VulnerableHeaderInjection;
}

const std::vector<std::string>& default_volatile_headers() {
  static const std::vector<std::string> names = {
      "date",       "set-cookie",     "etag",       "last-modified",
      "expires",    "content-length", "connection", "keep-alive",
  };
  return names;
}

namespace {

bool is_volatile(const Bytes& name, const std::vector<std::string>& volatiles) {
  for (const auto& v : volatiles)
    if (iequals_ascii(name, v)) return true;
  return false;
}

bool baseline_has_header(const std::optional<ResponseHead>& baseline,
                         const Bytes& name,
                         const std::vector<std::string>& volatiles) {
  if (!baseline) return false;
  if (is_volatile(name, volatiles)) return false;
  return baseline->find_header(name) != nullptr;
}

Bytes body_excerpt(const Bytes& body, std::size_t hit, std::size_t hit_len) {
  constexpr std::size_t ctx = 48;
  std::size_t begin = hit > ctx ? hit - ctx : 0;
  std::size_t end = std::min(body.size(), hit + hit_len + ctx);
  return body.substr(begin, end - begin);
}

}  // namespace

Verdict classify(const std::optional<ResponseHead>& baseline,
                 const ResponseHead& response, const Canary& canary,
                 const std::vector<std::string>& volatile_headers) {
  // Rule 1: response split. Either the forged status line itself carries the
  // nonce, or a nonce-bearing header line sits after an embedded status line
  // (it belongs to the forged response, not the real one).
  for (const auto& em : response.embedded_status_lines) {
    if (em.raw.find(canary.nonce) != Bytes::npos)
      return {VerdictClass::VulnerableResponseSplit, em.raw, std::nullopt};
    for (const auto& h : response.headers) {
      if (h.line_index > em.line_index && h.raw.find(canary.nonce) != Bytes::npos)
        return {VerdictClass::VulnerableResponseSplit,
                em.raw + "\r\n" + h.raw, std::nullopt};
    }
  }

  // Rule 2: the canary became a real header line of the primary response.
  // Suppressed when the baseline already had a header of that name.
  for (const auto& h : response.headers) {
    if (iequals_ascii(h.name, canary.header_name) &&
        !baseline_has_header(baseline, h.name, volatile_headers))
      return {VerdictClass::VulnerableHeaderInjection, h.raw, std::nullopt};
  }

  // Rule 3: nonce visible inside some header's value. Text reflection, not
  // structure; reported but not a vulnerability.
  for (const auto& h : response.headers) {
    if (h.value.find(canary.nonce) != Bytes::npos)
      return {VerdictClass::ReflectedValueOnly, h.raw, std::nullopt};
  }

  // Rule 4: nonce only in the body.
  auto hit = response.body_prefix.find(canary.nonce);
  if (hit != Bytes::npos)
    return {VerdictClass::ReflectedBodyOnly,
            body_excerpt(response.body_prefix, hit, canary.nonce.size()),
            std::nullopt};

  return {VerdictClass::NotVulnerable, {}, std::nullopt};
}

}  // namespace crlfscan
