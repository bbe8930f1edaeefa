#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crlfscan/classify.hpp"
#include "crlfscan/payload.hpp"
#include "crlfscan/request.hpp"
#include "crlfscan/response.hpp"
#include "crlfscan/target.hpp"
#include "crlfscan/transport.hpp"

namespace crlfscan {

struct ScanConfig {
  int global_concurrency = 16;
  int concurrency_per_host = 4;  // must stay <= global_concurrency
  ConnectionOptions connection;
  std::size_t body_cap = 16 * 1024;       // body_prefix kept for classification
  std::vector<std::string> payload_ids;   // empty = full catalog
  bool inject_headers = false;
  std::vector<std::string> header_sinks = {"User-Agent", "Referer"};
  std::optional<std::uint64_t> rng_seed;
  std::vector<std::string> volatile_headers = default_volatile_headers();
};

struct Finding {
  Target target;
  InjectionPoint point;
  std::string payload_id;
  std::string canary_nonce;
  Verdict verdict;
  std::optional<int> baseline_status;  // absent when the baseline failed
  std::optional<int> probe_status;     // absent when no status line was read
  std::string timestamp;               // UTC, ISO-8601
};

enum class SiteVerdict { Vulnerable, NotVulnerable, Inconclusive };

std::string_view to_string(SiteVerdict verdict);

struct SiteResult {
  std::string url;  // raw_url as given
  SiteVerdict verdict = SiteVerdict::Inconclusive;
};

struct ScanReport {
  ScanConfig config;
  std::string started_at;
  std::string finished_at;
  std::size_t targets_total = 0;
  std::vector<SiteResult> sites;  // one per input target, input order
  std::map<std::string, std::size_t> verdict_counts;  // site-level, by name
  std::vector<Finding> findings;      // strongest per (target, point)
  std::vector<Finding> raw_findings;  // every (target, point, payload) triple
};

std::string utc_now_iso8601();

/// The probe sites of one target, in fixed order: each query value, each
/// query name, the path suffix, then (when enabled) each header sink.
std::vector<InjectionPoint> enumerate_points(const Target& target,
                                             const ScanConfig& config);

/// Fetches and parses the endpoint's unmodified response. Transport and
/// parse errors propagate; scan() records them as an absent baseline.
ResponseHead probe_baseline(const Target& target, const ConnectionOptions& opts);

/// Runs the full pipeline: baselines first, then one probe per
/// (target, point, payload), all under the global and per-host concurrency
/// budgets. Canaries are drawn in plan order from rng_seed, so a fixed seed
/// reproduces the same probes. Output ordering is deterministic regardless
/// of completion order. Throws std::invalid_argument on an empty target
/// list, bad concurrency bounds, or unknown payload ids.
ScanReport scan(const std::vector<Target>& targets, const ScanConfig& config,
                const std::vector<Payload>& catalog = builtin_payloads());

}  // namespace crlfscan
