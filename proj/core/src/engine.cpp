#include "crlfscan/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <condition_variable>
#include <ctime>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace crlfscan {

std::string_view to_string(SiteVerdict verdict) {
  switch (verdict) {
    case SiteVerdict::Vulnerable: return "vulnerable";
    case SiteVerdict::NotVulnerable: return "not-vulnerable";
    case SiteVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string utc_now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<InjectionPoint> enumerate_points(const Target& target,
                                             const ScanConfig& config) {
  std::vector<InjectionPoint> points;
  for (std::size_t i = 0; i < target.query_pairs.size(); ++i)
    points.push_back({PointKind::QueryValue, i, {}, SpliceMode::Replace});
  for (std::size_t i = 0; i < target.query_pairs.size(); ++i)
    points.push_back({PointKind::QueryName, i, {}, SpliceMode::Replace});
  points.push_back({PointKind::PathSuffix, 0, {}, SpliceMode::Append});
  if (config.inject_headers)
    for (const auto& sink : config.header_sinks)
      points.push_back({PointKind::Header, 0, sink, SpliceMode::Replace});
  return points;
}

ResponseHead probe_baseline(const Target& target, const ConnectionOptions& opts) {
  Bytes raw = exchange(target, serialize_baseline(target), opts);
  return parse_response_head(raw);
}

namespace {

// Counting per-key semaphore; the global budget is the worker count itself.
class HostBudget {
 public:
  explicit HostBudget(int limit) : limit_(limit) {}

  void acquire(const std::string& host) {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return in_use_[host] < limit_; });
    ++in_use_[host];
  }

  void release(const std::string& host) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      --in_use_[host];
    }
    cv_.notify_all();
  }

 private:
  int limit_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::unordered_map<std::string, int> in_use_;
};

struct BaselineResult {
  std::optional<ResponseHead> head;
  std::optional<int> status;
  std::string error;  // set when head is absent
};

struct ProbeTask {
  std::size_t target_idx = 0;
  std::size_t point_idx = 0;
  std::size_t payload_idx = 0;  // index into the active payload list
  InjectionPoint point;
  const Payload* payload = nullptr;
  Canary canary;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void run_parallel(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : threads) th.join();
}

std::string transport_detail(const TransportError& e) {
  return std::string(to_string(e.kind())) + ": " + e.what();
}

}  // namespace

ScanReport scan(const std::vector<Target>& targets, const ScanConfig& config,
                const std::vector<Payload>& catalog) {
  if (targets.empty()) throw std::invalid_argument("no targets to scan");
  if (config.global_concurrency < 1 || config.concurrency_per_host < 1 ||
      config.concurrency_per_host > config.global_concurrency)
    throw std::invalid_argument("invalid concurrency bounds");

  // Active payloads keep catalog order regardless of how ids were listed.
  std::vector<const Payload*> active;
  if (config.payload_ids.empty()) {
    for (const auto& p : catalog) active.push_back(&p);
  } else {
    for (const auto& id : config.payload_ids) {
      bool known = false;
      for (const auto& p : catalog) known = known || p.id == id;
      if (!known) throw std::invalid_argument("unknown payload id: " + id);
    }
    for (const auto& p : catalog) {
      if (std::find(config.payload_ids.begin(), config.payload_ids.end(),
                    p.id) != config.payload_ids.end())
        active.push_back(&p);
    }
  }
  if (active.empty()) throw std::invalid_argument("payload selection is empty");

  ignore_sigpipe();
  ScanReport report;
  report.config = config;
  report.started_at = utc_now_iso8601();
  report.targets_total = targets.size();

  // Plan first: canaries are drawn here, in deterministic order, so the rest
  // of the run can complete in any order without losing reproducibility.
  CanarySource canaries(config.rng_seed);
  std::vector<std::vector<InjectionPoint>> points_per_target;
  points_per_target.reserve(targets.size());
  for (const auto& t : targets)
    points_per_target.push_back(enumerate_points(t, config));

  std::vector<ProbeTask> plan;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const auto& points = points_per_target[ti];
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      for (std::size_t yi = 0; yi < active.size(); ++yi) {
        ProbeTask task;
        task.target_idx = ti;
        task.point_idx = pi;
        task.payload_idx = yi;
        task.point = points[pi];
        task.payload = active[yi];
        task.canary = canaries.next();
        plan.push_back(std::move(task));
      }
    }
  }

  HostBudget budget(config.concurrency_per_host);

  // Phase 1: one baseline per distinct URL, concurrently.
  std::vector<std::string> baseline_urls;
  std::unordered_map<std::string, BaselineResult> baselines;
  for (const auto& t : targets)
    if (baselines.emplace(t.raw_url, BaselineResult{}).second)
      baseline_urls.push_back(t.raw_url);
  std::unordered_map<std::string, const Target*> by_url;
  for (const auto& t : targets) by_url.emplace(t.raw_url, &t);

  run_parallel(baseline_urls.size(), config.global_concurrency,
               [&](std::size_t i) {
                 const Target& t = *by_url.at(baseline_urls[i]);
                 BaselineResult& slot = baselines.at(baseline_urls[i]);
                 budget.acquire(t.host_port());
                 try {
                   ResponseHead head = probe_baseline(t, config.connection);
                   slot.status = head.status_code;
                   slot.head = std::move(head);
                 } catch (const TransportError& e) {
                   slot.error = transport_detail(e);
                 } catch (const ResponseParseError& e) {
                   slot.error = std::string("unparseable baseline: ") + e.what();
                 }
                 budget.release(t.host_port());
               });

  // Phase 2: the probes. Results land in plan slots, so completion order is
  // irrelevant.
  std::vector<Finding> raw(plan.size());
  run_parallel(plan.size(), config.global_concurrency, [&](std::size_t i) {
    const ProbeTask& task = plan[i];
    const Target& target = targets[task.target_idx];
    const BaselineResult& base = baselines.at(target.raw_url);

    Finding f;
    f.target = target;
    f.point = task.point;
    f.payload_id = task.payload->id;
    f.canary_nonce = task.canary.nonce;
    f.baseline_status = base.status;

    budget.acquire(target.host_port());
    try {
      Bytes payload_bytes = instantiate(*task.payload, task.canary);
      SerializedRequest req = serialize_probe(target, task.point, payload_bytes);
      Bytes raw_response = exchange(target, req.bytes, config.connection);
      ResponseHead head = parse_response_head(raw_response);
      if (head.body_prefix.size() > config.body_cap)
        head.body_prefix.resize(config.body_cap);
      f.probe_status = head.status_code;
      f.verdict = classify(base.head, head, task.canary, config.volatile_headers);
      if (!base.head && !is_vulnerable(f.verdict.cls)) {
        // Without a baseline, absence of evidence proves nothing.
        f.verdict.cls = VerdictClass::Inconclusive;
        f.verdict.error_detail = "baseline unavailable (" + base.error + ")";
      }
    } catch (const TransportError& e) {
      f.verdict = {VerdictClass::Inconclusive, {}, transport_detail(e)};
    } catch (const ResponseParseError& e) {
      f.verdict = {VerdictClass::Inconclusive, {},
                   std::string("unparseable response: ") + e.what()};
    }
    budget.release(target.host_port());

    // Case-insensitive: rule 2 accepts case-mangled canary names, so the
    // evidence may carry the nonce uppercased.
    assert(!is_vulnerable(f.verdict.cls) ||
           (!f.verdict.evidence.empty() &&
            icontains_ascii(f.verdict.evidence, task.canary.nonce)));
    f.timestamp = utc_now_iso8601();
    raw[i] = std::move(f);
  });

  // Deterministic ordering: raw_url, then point order, then catalog order.
  std::vector<std::size_t> order(plan.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ProbeTask& ta = plan[a];
    const ProbeTask& tb = plan[b];
    return std::tie(targets[ta.target_idx].raw_url, ta.target_idx, ta.point_idx,
                    ta.payload_idx) <
           std::tie(targets[tb.target_idx].raw_url, tb.target_idx, tb.point_idx,
                    tb.payload_idx);
  });
  report.raw_findings.reserve(plan.size());
  for (std::size_t i : order) report.raw_findings.push_back(raw[i]);

  // Dedup: strongest verdict per (target, point); ties keep catalog order.
  // The same pass gathers what the site verdicts need.
  std::vector<char> any_vuln(targets.size(), 0);
  std::vector<char> any_blind_inconclusive(targets.size(), 0);
  std::size_t cursor = 0;
  while (cursor < order.size()) {
    std::size_t best = order[cursor];
    std::size_t end = cursor;
    while (end < order.size() &&
           plan[order[end]].target_idx == plan[best].target_idx &&
           plan[order[end]].point_idx == plan[best].point_idx) {
      if (severity_rank(raw[order[end]].verdict.cls) >
          severity_rank(raw[best].verdict.cls))
        best = order[end];
      ++end;
    }
    const Finding& f = raw[best];
    std::size_t ti = plan[best].target_idx;
    if (is_vulnerable(f.verdict.cls)) any_vuln[ti] = 1;
    if (f.verdict.cls == VerdictClass::Inconclusive && !f.baseline_status)
      any_blind_inconclusive[ti] = 1;
    report.findings.push_back(f);
    cursor = end;
  }

  // A site is vulnerable on any vulnerable point; inconclusive only when the
  // doubt is blind (no baseline to confirm absence against).
  report.sites.reserve(targets.size());
  report.verdict_counts = {{"vulnerable", 0}, {"not-vulnerable", 0},
                           {"inconclusive", 0}};
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    SiteVerdict sv = any_vuln[ti] ? SiteVerdict::Vulnerable
                     : any_blind_inconclusive[ti] ? SiteVerdict::Inconclusive
                                                  : SiteVerdict::NotVulnerable;
    report.sites.push_back({targets[ti].raw_url, sv});
    report.verdict_counts[std::string(to_string(sv))]++;
  }

  report.finished_at = utc_now_iso8601();
  return report;
}

}  // namespace crlfscan
