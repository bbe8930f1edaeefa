#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crlfscan/bytes.hpp"
#include "crlfscan/payload.hpp"
#include "crlfscan/response.hpp"

namespace crlfscan {

enum class VerdictClass {
  VulnerableResponseSplit,    // a second status line attributable to the probe
  VulnerableHeaderInjection,  // the canary surfaced as its own header line
  ReflectedValueOnly,         // nonce inside an existing header's value
  ReflectedBodyOnly,          // nonce only in the body
  NotVulnerable,
  Inconclusive,               // set by callers on transport/parse failure
};

std::string_view to_string(VerdictClass cls);

/// Higher rank wins when several probes hit the same injection point.
int severity_rank(VerdictClass cls);

bool is_vulnerable(VerdictClass cls);

struct Verdict {
  VerdictClass cls = VerdictClass::NotVulnerable;
  Bytes evidence;  // matched head/body bytes; empty for not-vulnerable
  std::optional<std::string> error_detail;  // inconclusive only
};

/// Headers that churn between otherwise identical responses; matches against
/// them never count during baseline comparison. Lowercase names.
const std::vector<std::string>& default_volatile_headers();

/// Decides what one probe response proves. First matching rule wins:
///
///   1. An embedded status line carrying the nonce, or any nonce-bearing
///      header line after an embedded status line   -> response split.
///   2. A header named exactly canary.header_name (case-insensitive) that
///      the baseline, when present, lacks           -> header injection.
///   3. Nonce inside some header's value            -> value reflection.
///   4. Nonce only in the body prefix               -> body reflection.
///   5. Otherwise                                   -> not vulnerable.
///
/// Only rules 1 and 2 are vulnerabilities: the nonce must show up as response
/// *structure*, not merely as reflected text. Malformed head lines never
/// count as evidence, even when the nonce appears in them. Pure function.
Verdict classify(const std::optional<ResponseHead>& baseline,
                 const ResponseHead& response, const Canary& canary,
                 const std::vector<std::string>& volatile_headers =
                     default_volatile_headers());

}  // namespace crlfscan
