#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crlfscan/bytes.hpp"

namespace crlfscan {

/// Per-probe marker. Its structural appearance in a response head (a header
/// named header_name, or the nonce inside an injected status line) is what
/// proves injection; plain substring reflection never does.
struct Canary {
  std::string nonce;        // exactly 12 chars of [a-z0-9]
  std::string header_name;  // "x-crlf-" + nonce
  std::string header_value; // == nonce
};

inline constexpr std::string_view kCanaryHeaderPrefix = "x-crlf-";
inline constexpr std::size_t kCanaryNonceLength = 12;

/// Seedable canary generator. Thread-safe; a fixed seed reproduces the same
/// nonce sequence across runs. Issued nonces are tracked so one source never
/// repeats itself within a run.
class CanarySource {
 public:
  explicit CanarySource(std::optional<std::uint64_t> seed = std::nullopt);

  Canary next();

 private:
  std::mutex mu_;
  std::mt19937_64 rng_;
  std::unordered_set<std::string> issued_;
};

/// Convenience one-shot draw (fresh source per call).
Canary new_canary(std::optional<std::uint64_t> seed = std::nullopt);

enum class EncodingClass {
  RawOctets,           // literal CR/LF bytes in the request target
  Percent,             // %0d%0a forms, decoded by one server-side pass
  DoublePercent,       // %250d%250a, needs two decode passes
  UnicodeTrailingByte, // UTF-8 sequences whose trailing bytes are 0x8a/0x8d
  BareLf,              // %0a alone
  BareCr,              // %0d alone
};

std::string_view to_string(EncodingClass cls);

struct Payload {
  std::string id;
  Bytes template_bytes;  // contains {NAME} then {VALUE}, each exactly once
  EncodingClass encoding_class;
  std::string description;
};

inline constexpr std::string_view kNamePlaceholder = "{NAME}";
inline constexpr std::string_view kValuePlaceholder = "{VALUE}";

class CatalogError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The built-in catalog in its fixed, documented order. Immutable for a given
/// artifact version and safe to share across scan workers.
const std::vector<Payload>& builtin_payloads();

/// nullptr when the id is unknown.
const Payload* find_payload(std::string_view id);

/// Substitutes {NAME} -> canary.header_name and {VALUE} -> canary.header_value,
/// altering no other byte. Throws CatalogError if either placeholder is absent.
Bytes instantiate(const Payload& payload, const Canary& canary);

}  // namespace crlfscan
