#pragma once

#include <string>

#include "crlfscan/bytes.hpp"
#include "crlfscan/engine.hpp"

namespace crlfscan {

/// Line-oriented JSON: one header object (schema_version "1", config echo,
/// site-level counts), then one object per deduplicated finding with keys
/// url, point_kind, point_index_or_name, payload_id, verdict, evidence_b64,
/// baseline_status, probe_status, timestamp — in that order. Evidence rides
/// base64-encoded since it routinely holds raw CR/LF. Ends with a newline.
Bytes to_jsonl(const ScanReport& report);

/// RFC-4180 CSV over the same deduplicated findings, header row first.
/// Columns: url, point_kind, point_index_or_name, payload_id, verdict,
/// baseline_status, probe_status, timestamp. Evidence is omitted: raw
/// control octets have no business in a spreadsheet.
Bytes to_csv(const ScanReport& report);

/// Human-readable roll-up: "<N> scanned, <V> vulnerable, <I> inconclusive,
/// <NV> not vulnerable", then the strongest finding per vulnerable target.
std::string summary(const ScanReport& report);

}  // namespace crlfscan
