#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crlfscan/classify.hpp"
#include "crlfscan/response.hpp"

using namespace crlfscan;

namespace {

const Canary kCanary{"abc012def345", "x-crlf-abc012def345", "abc012def345"};

ResponseHead parse(const std::string& raw) { return parse_response_head(raw); }

}  // namespace

TEST_CASE("severity ranks order the verdict classes", "[classify]") {
  CHECK(severity_rank(VerdictClass::VulnerableResponseSplit) >
        severity_rank(VerdictClass::VulnerableHeaderInjection));
  CHECK(severity_rank(VerdictClass::VulnerableHeaderInjection) >
        severity_rank(VerdictClass::ReflectedValueOnly));
  CHECK(severity_rank(VerdictClass::ReflectedValueOnly) >
        severity_rank(VerdictClass::ReflectedBodyOnly));
  CHECK(severity_rank(VerdictClass::ReflectedBodyOnly) >
        severity_rank(VerdictClass::NotVulnerable));
  CHECK(severity_rank(VerdictClass::NotVulnerable) >
        severity_rank(VerdictClass::Inconclusive));
}

TEST_CASE("only the two structural classes are vulnerable", "[classify]") {
  CHECK(is_vulnerable(VerdictClass::VulnerableResponseSplit));
  CHECK(is_vulnerable(VerdictClass::VulnerableHeaderInjection));
  CHECK_FALSE(is_vulnerable(VerdictClass::ReflectedValueOnly));
  CHECK_FALSE(is_vulnerable(VerdictClass::ReflectedBodyOnly));
  CHECK_FALSE(is_vulnerable(VerdictClass::NotVulnerable));
  CHECK_FALSE(is_vulnerable(VerdictClass::Inconclusive));
}

TEST_CASE("verdict classes render as their wire names", "[classify]") {
  CHECK(to_string(VerdictClass::VulnerableResponseSplit) ==
        "vulnerable-response-split");
  CHECK(to_string(VerdictClass::VulnerableHeaderInjection) ==
        "vulnerable-header-injection");
  CHECK(to_string(VerdictClass::ReflectedValueOnly) == "reflected-value-only");
  CHECK(to_string(VerdictClass::ReflectedBodyOnly) == "reflected-body-only");
  CHECK(to_string(VerdictClass::NotVulnerable) == "not-vulnerable");
  CHECK(to_string(VerdictClass::Inconclusive) == "inconclusive");
}

TEST_CASE("classify works without a baseline", "[classify]") {
  ResponseHead probe =
      parse("HTTP/1.1 200 OK\r\nx-crlf-abc012def345: abc012def345\r\n\r\nok");
  Verdict v = classify(std::nullopt, probe, kCanary);
  CHECK(v.cls == VerdictClass::VulnerableHeaderInjection);
  CHECK_FALSE(v.error_detail.has_value());
}

TEST_CASE("baseline header with the canary's name suppresses rule 2",
          "[classify]") {
  ResponseHead probe =
      parse("HTTP/1.1 200 OK\r\nx-crlf-abc012def345: abc012def345\r\n\r\nok");
  ResponseHead base =
      parse("HTTP/1.1 200 OK\r\nx-crlf-abc012def345: old\r\n\r\nok");

  // Suppressed: the endpoint always emits this name, so its presence in the
  // probe response proves nothing. The nonce in its value still reflects.
  Verdict v = classify(base, probe, kCanary);
  CHECK(v.cls == VerdictClass::ReflectedValueOnly);

  // A volatile list that names the canary header makes the baseline match
  // ineligible, so rule 2 fires again.
  std::vector<std::string> vol = {"x-crlf-abc012def345"};
  Verdict forced = classify(base, probe, kCanary, vol);
  CHECK(forced.cls == VerdictClass::VulnerableHeaderInjection);
}

TEST_CASE("volatile headers are invisible to baseline comparison only",
          "[classify]") {
  // Sanity: the default list contains the classic churners.
  const auto& vol = default_volatile_headers();
  auto has = [&vol](const char* n) {
    for (const auto& v : vol)
      if (v == n) return true;
    return false;
  };
  CHECK(has("date"));
  CHECK(has("set-cookie"));
  CHECK(has("etag"));
}

TEST_CASE("arbitrary bodies never classify as vulnerable", "[classify]") {
  ResponseHead base = parse("HTTP/1.1 200 OK\r\nA: 1\r\n\r\nok");
  std::mt19937 rng(99u);
  std::uniform_int_distribution<int> len(0, 120);
  const std::string pieces[] = {
      "abc012def345",
      "x-crlf-abc012def345: abc012def345",
      "HTTP/1.1 200 OK",
      "\r\n",
      "\n",
      "plain text ",
  };
  std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1);

  for (int iter = 0; iter < 500; ++iter) {
    std::string body;
    const int n = len(rng) / 16;
    for (int i = 0; i <= n; ++i) body += pieces[pick(rng)];

    ResponseHead probe = parse("HTTP/1.1 200 OK\r\nA: 1\r\n\r\n" + body);
    Verdict v = classify(base, probe, kCanary);
    INFO(body);
    const bool benign = v.cls == VerdictClass::ReflectedBodyOnly ||
                        v.cls == VerdictClass::NotVulnerable;
    CHECK(benign);
    if (body.find(kCanary.nonce) != std::string::npos)
      CHECK(v.cls == VerdictClass::ReflectedBodyOnly);
    else
      CHECK(v.cls == VerdictClass::NotVulnerable);
  }
}

TEST_CASE("evidence pinpoints the structural bytes", "[classify]") {
  ResponseHead split = parse(
      "HTTP/1.1 200 OK\r\nX-Pre: 1\r\nHTTP/1.1 200 OK\r\n"
      "x-crlf-abc012def345: abc012def345\r\n\r\nok");
  Verdict v = classify(std::nullopt, split, kCanary);
  REQUIRE(v.cls == VerdictClass::VulnerableResponseSplit);
  CHECK(v.evidence.find("HTTP/1.1 200 OK") != std::string::npos);
  CHECK(v.evidence.find("x-crlf-abc012def345") != std::string::npos);

  ResponseHead body = parse(
      "HTTP/1.1 200 OK\r\nA: 1\r\n\r\npadpadpad abc012def345 tail");
  Verdict bv = classify(std::nullopt, body, kCanary);
  REQUIRE(bv.cls == VerdictClass::ReflectedBodyOnly);
  CHECK(bv.evidence.find("abc012def345") != std::string::npos);
}
