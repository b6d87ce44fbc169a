#include "ekb/armor.hpp"

#include "ekb/error.hpp"

namespace ekb::armor {

namespace {

int nibble(char c) noexcept
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

} // namespace

bool is_hex_digit(char c) noexcept { return nibble(c) >= 0; }

bool is_separator(char c) noexcept { return c == ' ' || c == '\n'; }

std::string encode(std::span<const std::uint8_t> data)
{
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kAlphabet[b >> 4]);
        out.push_back(kAlphabet[b & 0x0F]);
    }
    return out;
}

std::string strip_separators(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (!is_separator(c)) {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::uint8_t> decode_strict(std::string_view text)
{
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    int high = -1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_separator(c)) {
            continue;
        }
        const int v = nibble(c);
        if (v < 0) {
            throw ArmorError(Errc::IllegalCharacter,
                             "illegal character in armored text at index " + std::to_string(i), i);
        }
        if (high < 0) {
            high = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((high << 4) | v));
            high = -1;
        }
    }
    if (high >= 0) {
        throw ArmorError(Errc::OddLength, "armored text has an odd number of hex digits", text.size());
    }
    return out;
}

bool is_armored(std::string_view text) noexcept
{
    std::size_t digits = 0;
    for (char c : text) {
        if (kAlphabet.find(c) != std::string_view::npos) {
            ++digits;
        } else if (!is_separator(c)) {
            return false;
        }
    }
    return digits % 2 == 0;
}

std::vector<std::string> extract_hex_runs(std::string_view text, std::size_t min_len)
{
    std::vector<std::string> runs;
    std::string current;
    auto flush = [&] {
        if (current.size() >= min_len) {
            runs.push_back(current);
        }
        current.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_hex_digit(c)) {
            current.push_back(c);
            continue;
        }
        const bool bridges = is_separator(c) && !current.empty() && i + 1 < text.size()
                             && is_hex_digit(text[i + 1]);
        if (!bridges) {
            flush();
        }
    }
    flush();
    return runs;
}

} // namespace ekb::armor
