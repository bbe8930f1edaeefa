#include "crlfscan/report.hpp"

#include <json.hpp>

#include "crlfscan/base64.hpp"

namespace crlfscan {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json point_index_or_name(const InjectionPoint& point) {
  switch (point.kind) {
    case PointKind::QueryValue:
    case PointKind::QueryName:
      return point.index;
    case PointKind::Header:
      return point.header_name;
    case PointKind::PathSuffix:
      return nullptr;
  }
  return nullptr;
}

ordered_json opt_int(const std::optional<int>& v) {
  if (v) return *v;
  return nullptr;
}

ordered_json finding_to_json(const Finding& f) {
  ordered_json j;
  j["url"] = f.target.raw_url;
  j["point_kind"] = std::string(to_string(f.point.kind));
  j["point_index_or_name"] = point_index_or_name(f.point);
  j["payload_id"] = f.payload_id;
  j["verdict"] = std::string(to_string(f.verdict.cls));
  j["evidence_b64"] = base64_encode(f.verdict.evidence);
  j["baseline_status"] = opt_int(f.baseline_status);
  j["probe_status"] = opt_int(f.probe_status);
  j["timestamp"] = f.timestamp;
  return j;
}

std::string csv_field(const std::string& s) {
  bool quote = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_point_index_or_name(const InjectionPoint& point) {
  switch (point.kind) {
    case PointKind::QueryValue:
    case PointKind::QueryName:
      return std::to_string(point.index);
    case PointKind::Header:
      return point.header_name;
    case PointKind::PathSuffix:
      return "";
  }
  return "";
}

const Finding* strongest_for_url(const ScanReport& report,
                                 const std::string& url) {
  const Finding* best = nullptr;
  for (const auto& f : report.findings) {
    if (f.target.raw_url != url) continue;
    if (!best || severity_rank(f.verdict.cls) > severity_rank(best->verdict.cls))
      best = &f;
  }
  return best;
}

}  // namespace

Bytes to_jsonl(const ScanReport& report) {
  ordered_json header;
  header["schema_version"] = "1";
  header["started_at"] = report.started_at;
  header["finished_at"] = report.finished_at;
  header["targets_total"] = report.targets_total;
  ordered_json cfg;
  if (report.config.rng_seed) cfg["seed"] = *report.config.rng_seed;
  else cfg["seed"] = nullptr;
  cfg["global_concurrency"] = report.config.global_concurrency;
  cfg["concurrency_per_host"] = report.config.concurrency_per_host;
  cfg["inject_headers"] = report.config.inject_headers;
  ordered_json ids = ordered_json::array();
  for (const auto& id : report.config.payload_ids) ids.push_back(id);
  cfg["payload_ids"] = ids;  // empty means the full catalog
  header["config"] = cfg;
  ordered_json counts;
  counts["vulnerable"] = report.verdict_counts.at("vulnerable");
  counts["not-vulnerable"] = report.verdict_counts.at("not-vulnerable");
  counts["inconclusive"] = report.verdict_counts.at("inconclusive");
  header["verdict_counts"] = counts;

  Bytes out = header.dump();
  out.push_back('\n');
  for (const auto& f : report.findings) {
    out += finding_to_json(f).dump();
    out.push_back('\n');
  }
  return out;
}

Bytes to_csv(const ScanReport& report) {
  Bytes out =
      "url,point_kind,point_index_or_name,payload_id,verdict,"
      "baseline_status,probe_status,timestamp\r\n";
  for (const auto& f : report.findings) {
    out += csv_field(f.target.raw_url);
    out.push_back(',');
    out += csv_field(std::string(to_string(f.point.kind)));
    out.push_back(',');
    out += csv_field(csv_point_index_or_name(f.point));
    out.push_back(',');
    out += csv_field(f.payload_id);
    out.push_back(',');
    out += csv_field(std::string(to_string(f.verdict.cls)));
    out.push_back(',');
    out += f.baseline_status ? std::to_string(*f.baseline_status) : "";
    out.push_back(',');
    out += f.probe_status ? std::to_string(*f.probe_status) : "";
    out.push_back(',');
    out += csv_field(f.timestamp);
    out += "\r\n";
  }
  return out;
}

std::string summary(const ScanReport& report) {
  std::string out = std::to_string(report.targets_total) + " scanned, " +
                    std::to_string(report.verdict_counts.at("vulnerable")) +
                    " vulnerable, " +
                    std::to_string(report.verdict_counts.at("inconclusive")) +
                    " inconclusive, " +
                    std::to_string(report.verdict_counts.at("not-vulnerable")) +
                    " not vulnerable\n";
  for (const auto& site : report.sites) {
    if (site.verdict != SiteVerdict::Vulnerable) continue;
    const Finding* top = strongest_for_url(report, site.url);
    if (!top) continue;
    out += "  " + site.url + ": " + std::string(to_string(top->verdict.cls)) +
           " at " + top->point.label() + " via " + top->payload_id + "\n";
  }
  return out;
}

}  // namespace crlfscan
