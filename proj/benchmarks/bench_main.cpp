#include <benchmark/benchmark.h>

#include <string>

#include "crlfscan/base64.hpp"
#include "crlfscan/bytes.hpp"
#include "crlfscan/classify.hpp"
#include "crlfscan/lab.hpp"
#include "crlfscan/payload.hpp"
#include "crlfscan/request.hpp"
#include "crlfscan/response.hpp"

using namespace crlfscan;

namespace {

const Canary kCanary{"abc012def345", "x-crlf-abc012def345", "abc012def345"};

Bytes small_head() {
  return "HTTP/1.1 200 OK\r\nContent-Type: text/plain\r\n"
         "Date: Mon, 01 Jan 2024 00:00:00 GMT\r\n\r\nok";
}

Bytes large_head() {
  Bytes raw = "HTTP/1.1 200 OK\r\n";
  for (int i = 0; i < 64; ++i)
    raw += "X-Header-" + std::to_string(i) + ": value number " +
           std::to_string(i) + " with some padding\r\n";
  raw += "\r\n";
  raw += std::string(4096, 'b');
  return raw;
}

Bytes adversarial_head() {
  Bytes raw = "HTTP/1.1 200 OK\r\n";
  for (int i = 0; i < 24; ++i) {
    raw += "garbage line without a separator number " + std::to_string(i) +
           "\r\n";
    raw += "HTTP/1.1 302 Found\r\n";
    raw += "X-Ok-" + std::to_string(i) + ": fine\rstray\r\n";
  }
  raw += "\r\nrest";
  return raw;
}

void bench_parse_small(benchmark::State& state) {
  const Bytes raw = small_head();
  for (auto _ : state) benchmark::DoNotOptimize(parse_response_head(raw));
}
BENCHMARK(bench_parse_small);

void bench_parse_large(benchmark::State& state) {
  const Bytes raw = large_head();
  for (auto _ : state) benchmark::DoNotOptimize(parse_response_head(raw));
}
BENCHMARK(bench_parse_large);

void bench_parse_adversarial(benchmark::State& state) {
  const Bytes raw = adversarial_head();
  for (auto _ : state) benchmark::DoNotOptimize(parse_response_head(raw));
}
BENCHMARK(bench_parse_adversarial);

void bench_classify(benchmark::State& state) {
  const ResponseHead baseline = parse_response_head(small_head());
  const ResponseHead probe = parse_response_head(
      "HTTP/1.1 200 OK\r\nX-Pre: 1\r\nHTTP/1.1 200 OK\r\n"
      "x-crlf-abc012def345: abc012def345\r\n\r\nok");
  std::optional<ResponseHead> base = baseline;
  for (auto _ : state)
    benchmark::DoNotOptimize(classify(base, probe, kCanary));
}
BENCHMARK(bench_classify);

void bench_serialize_probe(benchmark::State& state) {
  const Target target = parse_target("http://host.example:8080/a/b?x=1&y=2");
  const InjectionPoint point{PointKind::QueryValue, 1, "", SpliceMode::Replace};
  const Bytes payload =
      instantiate(*find_payload("crlf-percent"), kCanary);
  for (auto _ : state)
    benchmark::DoNotOptimize(serialize_probe(target, point, payload));
}
BENCHMARK(bench_serialize_probe);

void bench_percent_decode(benchmark::State& state) {
  const Bytes encoded =
      "%0d%0ax-crlf-abc012def345:%20abc012def345%20plus%20padding%21";
  for (auto _ : state) benchmark::DoNotOptimize(percent_decode(encoded));
}
BENCHMARK(bench_percent_decode);

void bench_lab_response(benchmark::State& state) {
  const LabEndpoint ep{"/vuln-header", LabBehavior::VulnHeader, {}};
  const Bytes target = "/vuln-header?q=%0d%0ax-crlf-abc012def345:%20hi";
  for (auto _ : state) benchmark::DoNotOptimize(lab_response(ep, target));
}
BENCHMARK(bench_lab_response);

void bench_base64_encode(benchmark::State& state) {
  const Bytes evidence =
      "HTTP/1.1 200 OK\r\nx-crlf-abc012def345: abc012def345\r\n" +
      std::string(256, 'e');
  for (auto _ : state) benchmark::DoNotOptimize(base64_encode(evidence));
}
BENCHMARK(bench_base64_encode);

}  // namespace

BENCHMARK_MAIN();
