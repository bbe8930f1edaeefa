#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crlfscan/engine.hpp"

namespace crlfscan {

inline constexpr int kExitClean = 0;         // scan done, nothing vulnerable
inline constexpr int kExitVulnerable = 1;    // scan done, >=1 vulnerable site
inline constexpr int kExitUsage = 2;         // bad flags / config / targets
inline constexpr int kExitInconclusive = 3;  // every target inconclusive

class CliUsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliInvocation {
  std::string subcommand;  // "scan", "lab" or "list-payloads"
  bool help_requested = false;
  std::string help_text;

  // scan
  std::vector<std::string> urls;
  std::optional<std::string> targets_file;
  std::string output_format = "summary";  // jsonl | csv | summary
  std::optional<std::string> output_path;
  ScanConfig config;
  std::optional<std::uint64_t> seed_flag;  // --seed before env fallback

  // lab
  std::uint16_t lab_port = 0;
  bool lab_fig4 = false;
};

/// argv -> invocation. Throws CliUsageError on anything malformed; --help at
/// any level comes back as help_requested + the rendered text instead.
/// The environment variable CRLF_SCAN_SEED fills config.rng_seed when
/// --seed was absent.
CliInvocation parse_args(int argc, const char* const* argv);

/// Executes an invocation. Streams are injectable for tests; `out` carries
/// reports, `err` carries diagnostics. Returns one of the kExit* codes.
int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_args + run with errors mapped to kExitUsage. The whole main().
int cli_main(int argc, const char* const* argv);

}  // namespace crlfscan
