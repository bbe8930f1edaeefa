#include <catch2/catch_amalgamated.hpp>

#include "crlfscan/bytes.hpp"

using namespace crlfscan;

TEST_CASE("percent_decode decodes a single pass only", "[bytes]") {
  CHECK(percent_decode("%0d%0a") == "\r\n");
  CHECK(percent_decode("%0D%0A") == "\r\n");
  CHECK(percent_decode("a%20b") == "a b");
  CHECK(percent_decode("plain") == "plain");
  // Double-encoded stays single-decoded.
  CHECK(percent_decode("%250d%250a") == "%0d%0a");
  CHECK(percent_decode(percent_decode("%250d%250a")) == "\r\n");
}

TEST_CASE("percent_decode leaves invalid escapes verbatim", "[bytes]") {
  CHECK(percent_decode("%zz") == "%zz");
  CHECK(percent_decode("%4") == "%4");
  CHECK(percent_decode("%") == "%");
  CHECK(percent_decode("100%") == "100%");
  CHECK(percent_decode("%gg%0a") == "%gg\n");
}

TEST_CASE("percent_decode never treats plus as space", "[bytes]") {
  CHECK(percent_decode("a+b") == "a+b");
}

TEST_CASE("percent_decode handles arbitrary octets", "[bytes]") {
  Bytes decoded = percent_decode("%00%ff%E5%98%8A");
  REQUIRE(decoded.size() == 5);
  CHECK(static_cast<unsigned char>(decoded[0]) == 0x00);
  CHECK(static_cast<unsigned char>(decoded[1]) == 0xff);
  CHECK(static_cast<unsigned char>(decoded[4]) == 0x8a);
}

TEST_CASE("ascii case helpers", "[bytes]") {
  CHECK(to_lower_ascii("X-CRLF-Abc") == "x-crlf-abc");
  CHECK(iequals_ascii("Content-Type", "content-type"));
  CHECK_FALSE(iequals_ascii("a", "ab"));
  CHECK(icontains_ascii("X-Echo: ABC012def345", "abc012DEF345"));
  CHECK_FALSE(icontains_ascii("short", "longer-needle"));
}

TEST_CASE("contains_cr_or_lf and strip_cr_lf", "[bytes]") {
  CHECK(contains_cr_or_lf("a\rb"));
  CHECK(contains_cr_or_lf("a\nb"));
  CHECK_FALSE(contains_cr_or_lf("plain text"));
  CHECK(strip_cr_lf("a\r\nb\rc\nd") == "abcd");
  CHECK(strip_cr_lf("clean") == "clean");
}

TEST_CASE("escape_control renders control octets readably", "[bytes]") {
  CHECK(escape_control("a\r\nb") == "a\\r\\nb");
  CHECK(escape_control("t\tx") == "t\\tx");
  CHECK(escape_control("back\\slash") == "back\\\\slash");
  CHECK(escape_control(Bytes("\x01", 1)) == "\\x01");
}
