#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crlfscan/cli.hpp"
#include "crlfscan/lab.hpp"
#include "test_support.hpp"

using namespace crlfscan;

namespace {

CliInvocation parse(std::vector<std::string> args) {
  std::vector<const char*> argv = {"crlfscan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) ::setenv("CRLF_SCAN_SEED", value, 1);
    else ::unsetenv("CRLF_SCAN_SEED");
  }
  ~EnvGuard() { ::unsetenv("CRLF_SCAN_SEED"); }
};

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = "/tmp/crlfscan_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++);
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

int run_quiet(const CliInvocation& inv, std::string* out_text = nullptr,
              std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int rc = run(inv, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

CliInvocation scan_invocation(const std::string& url) {
  return parse({"scan", "--url", url, "--seed", "42", "--connect-timeout",
                "1000", "--read-timeout", "2000"});
}

}  // namespace

TEST_CASE("scan flags land in the invocation", "[cli]") {
  EnvGuard env(nullptr);
  CliInvocation inv = parse(
      {"scan", "--url", "http://a/", "--url", "http://b/", "--format", "jsonl",
       "--concurrency", "8", "--per-host", "2", "--inject-headers",
       "--insecure", "--seed", "7", "--payloads", "crlf-percent,crlf-raw",
       "--connect-timeout", "1500", "--read-timeout", "2500"});
  CHECK(inv.subcommand == "scan");
  CHECK(inv.urls == std::vector<std::string>{"http://a/", "http://b/"});
  CHECK(inv.output_format == "jsonl");
  CHECK(inv.config.global_concurrency == 8);
  CHECK(inv.config.concurrency_per_host == 2);
  CHECK(inv.config.inject_headers);
  CHECK_FALSE(inv.config.connection.tls_verify);
  REQUIRE(inv.config.rng_seed.has_value());
  CHECK(*inv.config.rng_seed == 7);
  CHECK(inv.config.payload_ids ==
        std::vector<std::string>{"crlf-percent", "crlf-raw"});
  CHECK(inv.config.connection.connect_timeout ==
        std::chrono::milliseconds(1500));
  CHECK(inv.config.connection.read_timeout == std::chrono::milliseconds(2500));
}

TEST_CASE("malformed invocations raise usage errors", "[cli]") {
  EnvGuard env(nullptr);
  CHECK_THROWS_AS(parse({}), CliUsageError);                      // no subcommand
  CHECK_THROWS_AS(parse({"scan", "--nope"}), CliUsageError);      // unknown flag
  CHECK_THROWS_AS(parse({"scan", "--format", "xml"}), CliUsageError);
  CHECK_THROWS_AS(parse({"scan", "--concurrency", "0"}), CliUsageError);
  CHECK_THROWS_AS(parse({"frobnicate"}), CliUsageError);
}

TEST_CASE("the seed falls back to the environment", "[cli]") {
  {
    EnvGuard env("99");
    CliInvocation inv = parse({"scan", "--url", "http://h/"});
    REQUIRE(inv.config.rng_seed.has_value());
    CHECK(*inv.config.rng_seed == 99);
  }
  {
    EnvGuard env("99");  // explicit flag wins over the environment
    CliInvocation inv = parse({"scan", "--url", "http://h/", "--seed", "7"});
    REQUIRE(inv.config.rng_seed.has_value());
    CHECK(*inv.config.rng_seed == 7);
  }
  {
    EnvGuard env(nullptr);
    CliInvocation inv = parse({"scan", "--url", "http://h/"});
    CHECK_FALSE(inv.config.rng_seed.has_value());
  }
  {
    EnvGuard env("not-a-number");
    CHECK_THROWS_AS(parse({"scan", "--url", "http://h/"}), CliUsageError);
  }
}

TEST_CASE("help comes back as text, not an error", "[cli]") {
  CliInvocation inv = parse({"--help"});
  CHECK(inv.help_requested);
  CHECK(inv.help_text.find("scan") != std::string::npos);
  CHECK(inv.help_text.find("lab") != std::string::npos);

  std::string out;
  CHECK(run_quiet(inv, &out) == kExitClean);
  CHECK(out == inv.help_text);
}

TEST_CASE("list-payloads prints the whole catalog", "[cli]") {
  for (const auto& args : {std::vector<std::string>{"list-payloads"},
                           std::vector<std::string>{"--list-payloads"}}) {
    CliInvocation inv = parse(args);
    CHECK(inv.subcommand == "list-payloads");
    std::string out;
    CHECK(run_quiet(inv, &out) == kExitClean);
    for (const auto& p : builtin_payloads()) {
      INFO(p.id);
      CHECK(out.find(p.id) != std::string::npos);
    }
  }
}

TEST_CASE("lab flags parse", "[cli]") {
  CliInvocation inv = parse({"lab", "--port", "8123", "--fig4"});
  CHECK(inv.subcommand == "lab");
  CHECK(inv.lab_port == 8123);
  CHECK(inv.lab_fig4);
}

TEST_CASE("exit codes follow the verdicts", "[cli]") {
  LabServer server(default_lab_spec());
  server.start();

  SECTION("a vulnerable site exits 1") {
    std::string out;
    int rc = run_quiet(scan_invocation(server.origin() + "/vuln-header?q=x"),
                       &out);
    CHECK(rc == kExitVulnerable);
    CHECK(out.find("1 scanned, 1 vulnerable") != std::string::npos);
  }
  SECTION("a clean site exits 0") {
    std::string out;
    int rc =
        run_quiet(scan_invocation(server.origin() + "/sanitized?q=x"), &out);
    CHECK(rc == kExitClean);
    CHECK(out.find("1 scanned, 0 vulnerable") != std::string::npos);
  }
  SECTION("an unreachable site exits 3") {
    const std::uint16_t dead = testsupport::free_port();
    int rc = run_quiet(
        scan_invocation("http://127.0.0.1:" + std::to_string(dead) + "/?q=1"));
    CHECK(rc == kExitInconclusive);
  }
  SECTION("a scan without targets exits 2") {
    std::string err;
    int rc = run_quiet(parse({"scan"}), nullptr, &err);
    CHECK(rc == kExitUsage);
    CHECK(err.find("error:") != std::string::npos);
  }
  SECTION("an unparseable url exits 2") {
    std::string err;
    int rc = run_quiet(parse({"scan", "--url", "not-a-url"}), nullptr, &err);
    CHECK(rc == kExitUsage);
    CHECK(err.find("error:") != std::string::npos);
  }
  server.stop();
}

TEST_CASE("targets files mix with --url and skip noise", "[cli]") {
  LabServer server(default_lab_spec());
  server.start();
  TempFile file("# fleet under test\n\n  " + server.origin() +
                "/sanitized?q=a  \n" + server.origin() + "/body-echo?q=b\r\n");

  CliInvocation inv = parse({"scan", "--targets", file.path, "--seed", "1",
                             "--connect-timeout", "1000", "--read-timeout",
                             "2000"});
  std::string out;
  int rc = run_quiet(inv, &out);
  server.stop();
  CHECK(rc == kExitClean);
  CHECK(out.find("2 scanned, 0 vulnerable") != std::string::npos);
}

TEST_CASE("machine formats can write to a file with a console summary",
          "[cli]") {
  LabServer server(default_lab_spec());
  server.start();
  TempFile sink("");

  CliInvocation inv = parse({"scan", "--url",
                             server.origin() + "/vuln-header?q=x", "--seed",
                             "42", "--format", "jsonl", "--output", sink.path,
                             "--connect-timeout", "1000", "--read-timeout",
                             "2000"});
  std::string out;
  int rc = run_quiet(inv, &out);
  server.stop();

  CHECK(rc == kExitVulnerable);
  CHECK(out.find("1 scanned, 1 vulnerable") != std::string::npos);

  std::ifstream in(sink.path, std::ios::binary);
  std::string first_line;
  REQUIRE(std::getline(in, first_line));
  CHECK(first_line.find("\"schema_version\":\"1\"") != std::string::npos);
}

TEST_CASE("missing targets files are a usage error", "[cli]") {
  std::string err;
  CliInvocation inv =
      parse({"scan", "--targets", "/nonexistent/nowhere.txt"});
  CHECK(run_quiet(inv, nullptr, &err) == kExitUsage);
  CHECK(err.find("cannot read targets file") != std::string::npos);
}
