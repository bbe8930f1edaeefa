#include "crlfscan/payload.hpp"

#include <chrono>

namespace crlfscan {

namespace {

constexpr std::string_view kNonceAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";

std::uint64_t entropy_seed() {
  std::random_device rd;
  auto ticks = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ ticks;
}

}  // namespace

CanarySource::CanarySource(std::optional<std::uint64_t> seed)
    : rng_(seed ? *seed : entropy_seed()) {}

Canary CanarySource::next() {
  std::lock_guard<std::mutex> lock(mu_);
  std::uniform_int_distribution<std::size_t> pick(0, kNonceAlphabet.size() - 1);
  std::string nonce;
  do {
    nonce.clear();
    nonce.reserve(kCanaryNonceLength);
    for (std::size_t i = 0; i < kCanaryNonceLength; ++i)
      nonce.push_back(kNonceAlphabet[pick(rng_)]);
  } while (!issued_.insert(nonce).second);
  Canary c;
  c.nonce = nonce;
  c.header_name = std::string(kCanaryHeaderPrefix) + nonce;
  c.header_value = nonce;
  return c;
}

Canary new_canary(std::optional<std::uint64_t> seed) {
  CanarySource source(seed);
  return source.next();
}

std::string_view to_string(EncodingClass cls) {
  switch (cls) {
    case EncodingClass::RawOctets: return "raw-octets";
    case EncodingClass::Percent: return "percent";
    case EncodingClass::DoublePercent: return "double-percent";
    case EncodingClass::UnicodeTrailingByte: return "unicode-trailing-byte";
    case EncodingClass::BareLf: return "bare-lf";
    case EncodingClass::BareCr: return "bare-cr";
  }
  return "unknown";
}

const std::vector<Payload>& builtin_payloads() {
  static const std::vector<Payload> catalog = {
      {"crlf-percent", "%0d%0a{NAME}:%20{VALUE}", EncodingClass::Percent,
       "percent-encoded CRLF, lowercase hex"},
      {"crlf-percent-upper", "%0D%0A{NAME}:%20{VALUE}", EncodingClass::Percent,
       "percent-encoded CRLF, uppercase hex"},
      {"lf-only-percent", "%0a{NAME}:%20{VALUE}", EncodingClass::BareLf,
       "bare LF for parsers that accept LF line endings"},
      {"cr-only-percent", "%0d{NAME}:%20{VALUE}", EncodingClass::BareCr,
       "bare CR for parsers that treat CR alone as a break"},
      {"crlf-raw", "\r\n{NAME}: {VALUE}", EncodingClass::RawOctets,
       "literal CR LF octets placed directly in the target"},
      {"crlf-double-percent", "%250d%250a{NAME}:%20{VALUE}",
       EncodingClass::DoublePercent,
       "double-encoded CRLF for stacks that decode twice"},
      {"crlf-unicode-trailing", "%E5%98%8A%E5%98%8D{NAME}:%20{VALUE}",
       EncodingClass::UnicodeTrailingByte,
       "UTF-8 sequences whose trailing bytes are 0x8a 0x8d"},
      {"crlf-space-prefix", "%20%0d%0a{NAME}:%20{VALUE}", EncodingClass::Percent,
       "space before the break, defeats naive prefix filters"},
      {"crlf-split-status", "HTTP/1.1%20200%20OK%0d%0a{NAME}:%20{VALUE}",
       EncodingClass::Percent,
       "forged status line continuing the current head, then the canary"},
  };
  return catalog;
}

const Payload* find_payload(std::string_view id) {
  for (const auto& p : builtin_payloads())
    if (p.id == id) return &p;
  return nullptr;
}

namespace {

// Replaces the single occurrence of `placeholder`; throws when absent.
void substitute_once(Bytes& s, std::string_view placeholder,
                     const std::string& value, const std::string& payload_id) {
  auto pos = s.find(placeholder);
  if (pos == Bytes::npos)
    throw CatalogError("payload '" + payload_id + "' lacks placeholder " +
                       std::string(placeholder));
  s.replace(pos, placeholder.size(), value);
}

}  // namespace

Bytes instantiate(const Payload& payload, const Canary& canary) {
  Bytes out = payload.template_bytes;
  substitute_once(out, kNamePlaceholder, canary.header_name, payload.id);
  substitute_once(out, kValuePlaceholder, canary.header_value, payload.id);
  return out;
}

}  // namespace crlfscan
