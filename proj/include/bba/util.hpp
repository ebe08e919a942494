#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bba::util {

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// SHA-256 of the input, as a 64-char lowercase hex string.
std::string sha256_hex(std::string_view data);
std::string sha256_hex(const std::uint8_t* data, std::size_t len);

std::string trim(std::string_view s);
std::string lowercase(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Collapses all whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view s);

// Whitespace-plus-punctuation token count; the default tokenizer for
// token accounting. Punctuation characters split tokens but are not
// counted themselves.
int approx_token_count(std::string_view text);

// Splits on '\n'; keeps empty lines.
std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

// Fixed-point decimal formatting (no locale surprises).
std::string format_fixed(double value, int decimals);

}  // namespace bba::util
