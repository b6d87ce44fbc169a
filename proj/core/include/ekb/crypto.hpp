#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ekb/random.hpp"

namespace ekb {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kBlockSize = 16;
inline constexpr std::size_t kKeySize = 16;

using Iv = std::array<std::uint8_t, kBlockSize>;
using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(ByteView data);

inline ByteView as_bytes(std::string_view s) noexcept
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Lowercase hex; used for key export and digests in text files.
std::string to_hex_lower(ByteView data);

// Shared AES-128 key for one contact pair. Only leaves the process through
// to_hex().
class SecretKey {
public:
    explicit SecretKey(const std::array<std::uint8_t, kKeySize>& bytes) : bytes_(bytes) {}

    // 32 hex characters, either case. Throws Error(BadKey).
    static SecretKey from_hex(std::string_view hex);

    std::string to_hex() const { return to_hex_lower(bytes_); }

    ByteView bytes() const noexcept { return bytes_; }

    friend bool operator==(const SecretKey&, const SecretKey&) = default;

private:
    std::array<std::uint8_t, kKeySize> bytes_;
};

enum class MediaType : std::uint8_t {
    Text = 0,
    Image = 1,
    Audio = 2,
    VoiceMemo = 3,
    Video = 4,
};

inline constexpr std::array kAllMediaTypes = {MediaType::Text, MediaType::Image, MediaType::Audio,
                                              MediaType::VoiceMemo, MediaType::Video};

std::string_view to_string(MediaType media) noexcept;
// Accepts "text", "image", "audio", "voice-memo"/"voicememo", "video" (any case).
std::optional<MediaType> parse_media_type(std::string_view name);
std::optional<MediaType> media_from_tag(std::uint8_t tag) noexcept;

// Wire layout: "EKB1" | media tag | IV (16) | ciphertext.
struct Envelope {
    static constexpr std::array<std::uint8_t, 4> kMagic = {'E', 'K', 'B', '1'};
    static constexpr std::size_t kHeaderSize = 4 + 1 + kBlockSize;

    MediaType media = MediaType::Text;
    Iv iv{};
    Bytes ciphertext;

    Bytes serialize() const;

    // Structural validation only. BadMagic, BadMediaTag, BadLength.
    static Envelope parse(ByteView wire);

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

struct Decrypted {
    MediaType media;
    Bytes plaintext;

    friend bool operator==(const Decrypted&, const Decrypted&) = default;
};

SecretKey generate_key(RandomSource& rng);

// ciphertext size is 16 * (len / 16 + 1); PKCS#7 always adds a block.
std::size_t ciphertext_size(std::size_t plaintext_size) noexcept;

Envelope encrypt(ByteView plaintext, MediaType media, const SecretKey& key, RandomSource& rng);
Envelope encrypt_with_iv(ByteView plaintext, MediaType media, const SecretKey& key, const Iv& iv);

// Throws BadLength or BadPadding. There is no MAC: a wrong key or a tampered
// envelope is only caught when the padding happens to be invalid.
Decrypted decrypt(const Envelope& env, const SecretKey& key);
Decrypted decrypt(ByteView wire, const SecretKey& key);

} // namespace ekb
