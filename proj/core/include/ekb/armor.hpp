#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ekb::armor {

// Transport alphabet. Anything a recognizer emits must come from this set.
inline constexpr std::string_view kAlphabet = "0123456789ABCDEF";

// Smallest possible envelope is 21 bytes, i.e. 42 hex characters.
inline constexpr std::size_t kDefaultMinRun = 42;

bool is_hex_digit(char c) noexcept;
bool is_separator(char c) noexcept;

// Uppercase, two characters per byte, no separators.
std::string encode(std::span<const std::uint8_t> data);

// Removes spaces and newlines, nothing else.
std::string strip_separators(std::string_view text);

// Accepts either case and ignores space/newline. Throws ArmorError with
// OddLength or IllegalCharacter (position indexes the original text).
std::vector<std::uint8_t> decode_strict(std::string_view text);

// True if `text` contains only alphabet characters and separators and has an
// even number of hex digits.
bool is_armored(std::string_view text) noexcept;

// Maximal runs of hex digits in document order. A single space or newline
// between two digits continues a run; any other character, or two
// separators in a row, ends it. Returned runs have separators removed and
// are kept only if they hold at least `min_len` digits.
std::vector<std::string> extract_hex_runs(std::string_view text, std::size_t min_len = kDefaultMinRun);

} // namespace ekb::armor
