#include <doctest.h>

#include "bba/util.hpp"

using namespace bba::util;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("base64 round-trips across padding lengths") {
  for (const std::string& text : {std::string(""), std::string("f"), std::string("fo"),
                                  std::string("foo"), std::string("foob"),
                                  std::string("fooba"), std::string("foobar")}) {
    std::vector<std::uint8_t> bytes(text.begin(), text.end());
    auto decoded = base64_decode(base64_encode(bytes));
    CHECK(decoded == bytes);
  }
  CHECK(base64_encode(std::vector<std::uint8_t>{'f', 'o', 'o'}) == "Zm9v");
  CHECK(base64_encode(std::vector<std::uint8_t>{'f'}) == "Zg==");
}

TEST_CASE("approx_token_count splits on whitespace and punctuation") {
  CHECK(approx_token_count("a b c") == 3);
  CHECK(approx_token_count("a,b") == 2);
  CHECK(approx_token_count("") == 0);
  CHECK(approx_token_count("   ") == 0);
  CHECK(approx_token_count("one-two three") == 3);
}

TEST_CASE("string helpers") {
  CHECK(trim("  x  ") == "x");
  CHECK(trim("") == "");
  CHECK(lowercase("AbC") == "abc");
  CHECK(normalize_whitespace("  a \n b\t\tc ") == "a b c");
  CHECK(starts_with("foobar", "foo"));
  CHECK(ends_with("foobar", "bar"));
  CHECK(format_fixed(49.0942, 2) == "49.09");
  CHECK(format_fixed(0.5, 3) == "0.500");
}

TEST_CASE("split_lines keeps empty lines and strips CR") {
  auto lines = split_lines("a\r\n\nb");
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "a");
  CHECK(lines[1] == "");
  CHECK(lines[2] == "b");
}
