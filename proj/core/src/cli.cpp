#include "crlfscan/cli.hpp"

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "crlfscan/lab.hpp"
#include "crlfscan/report.hpp"
#include "crlfscan/version.hpp"

namespace crlfscan {

namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("CRLF_SCAN_SEED");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0')
    throw CliUsageError(std::string("CRLF_SCAN_SEED is not an integer: ") + raw);
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> read_targets_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliUsageError("cannot read targets file: " + path);
  std::vector<std::string> urls;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t");
    std::string trimmed = line.substr(b, e - b + 1);
    if (trimmed[0] == '#') continue;
    urls.push_back(trimmed);
  }
  return urls;
}

volatile std::sig_atomic_t g_lab_interrupted = 0;

void lab_signal_handler(int) { g_lab_interrupted = 1; }

}  // namespace

CliInvocation parse_args(int argc, const char* const* argv) {
  CliInvocation inv;
  bool list_flag = false;
  bool insecure = false;
  int connect_timeout_ms = -1;
  int read_timeout_ms = -1;

  CLI::App app{"crlfscan " + std::string(kVersion) +
               " — CRLF injection scanner with a built-in vulnerability lab"};
  app.name("crlfscan");
  app.add_flag("--list-payloads", list_flag,
               "Print the payload catalog and exit");

  CLI::App* scan = app.add_subcommand("scan", "Probe targets for CRLF injection");
  scan->add_option("--url", inv.urls, "Target URL (repeat for several)");
  scan->add_option("--targets", inv.targets_file,
                   "File with one URL per line; blank lines and # comments skipped");
  scan->add_option("--format", inv.output_format,
                   "Report format: summary (default), jsonl or csv")
      ->check(CLI::IsMember({"summary", "jsonl", "csv"}));
  scan->add_option("--output", inv.output_path,
                   "Write the report here instead of standard output");
  scan->add_option("--concurrency", inv.config.global_concurrency,
                   "Max in-flight probes overall")
      ->check(CLI::PositiveNumber);
  scan->add_option("--per-host", inv.config.concurrency_per_host,
                   "Max in-flight probes per host")
      ->check(CLI::PositiveNumber);
  scan->add_option("--connect-timeout", connect_timeout_ms,
                   "TCP connect timeout in milliseconds")
      ->check(CLI::PositiveNumber);
  scan->add_option("--read-timeout", read_timeout_ms,
                   "Response read timeout in milliseconds")
      ->check(CLI::PositiveNumber);
  scan->add_flag("--inject-headers", inv.config.inject_headers,
                 "Also probe the User-Agent and Referer request headers");
  scan->add_flag("--insecure", insecure, "Skip TLS certificate verification");
  scan->add_option("--seed", inv.seed_flag,
                   "RNG seed for reproducible canaries");
  scan->add_option("--payloads", inv.config.payload_ids,
                   "Restrict to these payload ids (comma separated)")
      ->delimiter(',');

  CLI::App* lab = app.add_subcommand(
      "lab", "Serve the local vulnerability lab (plain HTTP, loopback only)");
  lab->add_option("--port", inv.lab_port, "Port to bind (default: ephemeral)");
  lab->add_flag("--fig4", inv.lab_fig4,
                "Serve the 40-endpoint layout with 3 vulnerable sites");

  CLI::App* list = app.add_subcommand("list-payloads", "Print the payload catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    inv.help_requested = true;
    inv.help_text = app.help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw CliUsageError(e.what());
  }

  if (scan->parsed()) inv.subcommand = "scan";
  else if (lab->parsed()) inv.subcommand = "lab";
  else if (list->parsed() || list_flag) inv.subcommand = "list-payloads";
  else throw CliUsageError("expected a subcommand: scan, lab or list-payloads");

  if (inv.subcommand == "scan") {
    inv.config.rng_seed = inv.seed_flag ? inv.seed_flag : seed_from_env();
    inv.config.connection.tls_verify = !insecure;
    if (connect_timeout_ms > 0)
      inv.config.connection.connect_timeout =
          std::chrono::milliseconds(connect_timeout_ms);
    if (read_timeout_ms > 0)
      inv.config.connection.read_timeout =
          std::chrono::milliseconds(read_timeout_ms);
  }
  return inv;
}

namespace {

int run_list_payloads(std::ostream& out) {
  std::size_t id_w = 0, cls_w = 0, tpl_w = 0;
  struct Row {
    std::string id, cls, tpl, desc;
  };
  std::vector<Row> rows;
  for (const auto& p : builtin_payloads()) {
    Row r{p.id, std::string(to_string(p.encoding_class)),
          escape_control(p.template_bytes), p.description};
    id_w = std::max(id_w, r.id.size());
    cls_w = std::max(cls_w, r.cls.size());
    tpl_w = std::max(tpl_w, r.tpl.size());
    rows.push_back(std::move(r));
  }
  for (const auto& r : rows) {
    out << r.id << std::string(id_w - r.id.size() + 2, ' ') << r.cls
        << std::string(cls_w - r.cls.size() + 2, ' ') << r.tpl
        << std::string(tpl_w - r.tpl.size() + 2, ' ') << r.desc << "\n";
  }
  return kExitClean;
}

int run_lab(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  LabSpec spec = inv.lab_fig4 ? lab_fig4_layout() : default_lab_spec();
  spec.port = inv.lab_port;
  LabServer server(spec);
  try {
    server.start();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "lab listening on " << server.origin() << " ("
      << spec.materialized().size() << " endpoints)" << std::endl;

  g_lab_interrupted = 0;
  std::signal(SIGINT, lab_signal_handler);
  std::signal(SIGTERM, lab_signal_handler);
  while (!g_lab_interrupted)
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  out << "lab stopped" << std::endl;
  return kExitClean;
}

int run_scan(const CliInvocation& inv, std::ostream& out) {
  std::vector<std::string> urls = inv.urls;
  if (inv.targets_file) {
    auto from_file = read_targets_file(*inv.targets_file);
    urls.insert(urls.end(), from_file.begin(), from_file.end());
  }
  if (urls.empty())
    throw CliUsageError("scan needs at least one target (--url or --targets)");

  std::vector<Target> targets;
  targets.reserve(urls.size());
  for (const auto& u : urls) {
    try {
      targets.push_back(parse_target(u));
    } catch (const TargetParseError& e) {
      throw CliUsageError(e.what());
    }
  }

  ScanReport report;
  try {
    report = scan(targets, inv.config);
  } catch (const std::invalid_argument& e) {
    throw CliUsageError(e.what());
  }

  Bytes rendered;
  if (inv.output_format == "jsonl") rendered = to_jsonl(report);
  else if (inv.output_format == "csv") rendered = to_csv(report);
  else rendered = summary(report);

  if (inv.output_path) {
    std::ofstream f(*inv.output_path, std::ios::binary);
    if (!f) throw CliUsageError("cannot write output file: " + *inv.output_path);
    f.write(rendered.data(), static_cast<std::streamsize>(rendered.size()));
    if (inv.output_format != "summary") out << summary(report);
  } else {
    out.write(rendered.data(), static_cast<std::streamsize>(rendered.size()));
  }
  out.flush();

  if (report.verdict_counts.at("vulnerable") > 0) return kExitVulnerable;
  if (report.verdict_counts.at("inconclusive") == report.targets_total)
    return kExitInconclusive;
  return kExitClean;
}

}  // namespace

int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err) {
  if (invocation.help_requested) {
    out << invocation.help_text;
    return kExitClean;
  }
  try {
    if (invocation.subcommand == "list-payloads") return run_list_payloads(out);
    if (invocation.subcommand == "lab") return run_lab(invocation, out, err);
    if (invocation.subcommand == "scan") return run_scan(invocation, out);
    err << "error: unknown subcommand '" << invocation.subcommand << "'\n";
    return kExitUsage;
  } catch (const CliUsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cli_main(int argc, const char* const* argv) {
  try {
    CliInvocation inv = parse_args(argc, argv);
    return run(inv, std::cout, std::cerr);
  } catch (const CliUsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace crlfscan
