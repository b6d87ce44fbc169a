#include "ekb/crypto.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "ekb/armor.hpp"
#include "ekb/error.hpp"

namespace ekb {

namespace {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx make_ctx(const SecretKey& key, const Iv& iv, bool encrypting)
{
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) {
        throw Error(Errc::Io, "EVP_CIPHER_CTX_new failed");
    }
    const int ok = encrypting
        ? EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key.bytes().data(), iv.data())
        : EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key.bytes().data(), iv.data());
    if (ok != 1) {
        throw Error(Errc::Io, "AES-128-CBC init failed");
    }
    // PKCS#7 is applied here, not by EVP, so the padding check is ours.
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    return ctx;
}

Bytes run_cbc(const SecretKey& key, const Iv& iv, ByteView input, bool encrypting)
{
    auto ctx = make_ctx(key, iv, encrypting);
    Bytes out(input.size() + kBlockSize);
    int written = 0;
    if (EVP_CipherUpdate(ctx.get(), out.data(), &written, input.data(), static_cast<int>(input.size())) != 1) {
        throw Error(Errc::Io, "AES-128-CBC update failed");
    }
    int tail = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out.data() + written, &tail) != 1) {
        throw Error(Errc::Io, "AES-128-CBC final failed");
    }
    out.resize(static_cast<std::size_t>(written + tail));
    return out;
}

} // namespace

Sha256Digest sha256(ByteView data)
{
    Sha256Digest digest{};
    SHA256(data.data(), data.size(), digest.data());
    return digest;
}

std::string to_hex_lower(ByteView data)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0F]);
    }
    return out;
}

SecretKey SecretKey::from_hex(std::string_view hex)
{
    if (hex.size() != kKeySize * 2) {
        throw Error(Errc::BadKey, "key must be exactly 32 hex characters");
    }
    Bytes raw;
    try {
        raw = armor::decode_strict(hex);
    } catch (const ArmorError&) {
        throw Error(Errc::BadKey, "key contains non-hex characters");
    }
    if (raw.size() != kKeySize) {
        throw Error(Errc::BadKey, "key must be exactly 32 hex characters");
    }
    std::array<std::uint8_t, kKeySize> bytes{};
    std::copy(raw.begin(), raw.end(), bytes.begin());
    return SecretKey(bytes);
}

std::string_view to_string(MediaType media) noexcept
{
    switch (media) {
    case MediaType::Text: return "Text";
    case MediaType::Image: return "Image";
    case MediaType::Audio: return "Audio";
    case MediaType::VoiceMemo: return "Voice memo";
    case MediaType::Video: return "Video";
    }
    return "?";
}

std::optional<MediaType> parse_media_type(std::string_view name)
{
    std::string key;
    for (char c : name) {
        if (c != '-' && c != '_' && c != ' ') {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (key == "text") return MediaType::Text;
    if (key == "image") return MediaType::Image;
    if (key == "audio") return MediaType::Audio;
    if (key == "voicememo") return MediaType::VoiceMemo;
    if (key == "video") return MediaType::Video;
    return std::nullopt;
}

std::optional<MediaType> media_from_tag(std::uint8_t tag) noexcept
{
    if (tag > static_cast<std::uint8_t>(MediaType::Video)) {
        return std::nullopt;
    }
    return static_cast<MediaType>(tag);
}

Bytes Envelope::serialize() const
{
    Bytes out;
    out.reserve(kHeaderSize + ciphertext.size());
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(static_cast<std::uint8_t>(media));
    out.insert(out.end(), iv.begin(), iv.end());
    out.insert(out.end(), ciphertext.begin(), ciphertext.end());
    return out;
}

Envelope Envelope::parse(ByteView wire)
{
    if (wire.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), wire.begin())) {
        throw Error(Errc::BadMagic, "envelope does not start with EKB1");
    }
    if (wire.size() < kHeaderSize) {
        throw Error(Errc::BadLength, "envelope header truncated");
    }
    auto media = media_from_tag(wire[4]);
    if (!media) {
        throw Error(Errc::BadMediaTag, "unknown media tag " + std::to_string(wire[4]));
    }
    Envelope env;
    env.media = *media;
    std::copy_n(wire.begin() + 5, kBlockSize, env.iv.begin());
    env.ciphertext.assign(wire.begin() + kHeaderSize, wire.end());
    if (env.ciphertext.empty() || env.ciphertext.size() % kBlockSize != 0) {
        throw Error(Errc::BadLength, "ciphertext length " + std::to_string(env.ciphertext.size())
                                         + " is not a positive multiple of 16");
    }
    return env;
}

SecretKey generate_key(RandomSource& rng)
{
    std::array<std::uint8_t, kKeySize> bytes{};
    rng.fill(bytes);
    return SecretKey(bytes);
}

std::size_t ciphertext_size(std::size_t plaintext_size) noexcept
{
    return kBlockSize * (plaintext_size / kBlockSize + 1);
}

Envelope encrypt(ByteView plaintext, MediaType media, const SecretKey& key, RandomSource& rng)
{
    Iv iv{};
    rng.fill(iv);
    return encrypt_with_iv(plaintext, media, key, iv);
}

Envelope encrypt_with_iv(ByteView plaintext, MediaType media, const SecretKey& key, const Iv& iv)
{
    Bytes padded(plaintext.begin(), plaintext.end());
    const auto pad = static_cast<std::uint8_t>(kBlockSize - plaintext.size() % kBlockSize);
    padded.insert(padded.end(), pad, pad);

    Envelope env;
    env.media = media;
    env.iv = iv;
    env.ciphertext = run_cbc(key, iv, padded, true);
    return env;
}

Decrypted decrypt(const Envelope& env, const SecretKey& key)
{
    if (env.ciphertext.empty() || env.ciphertext.size() % kBlockSize != 0) {
        throw Error(Errc::BadLength, "ciphertext length is not a positive multiple of 16");
    }
    Bytes plain = run_cbc(key, env.iv, env.ciphertext, false);

    const std::uint8_t pad = plain.back();
    if (pad == 0 || pad > kBlockSize) {
        throw Error(Errc::BadPadding, "invalid PKCS#7 padding (wrong key or corrupted data)");
    }
    for (std::size_t i = plain.size() - pad; i < plain.size(); ++i) {
        if (plain[i] != pad) {
            throw Error(Errc::BadPadding, "invalid PKCS#7 padding (wrong key or corrupted data)");
        }
    }
    plain.resize(plain.size() - pad);
    return {env.media, std::move(plain)};
}

Decrypted decrypt(ByteView wire, const SecretKey& key)
{
    return decrypt(Envelope::parse(wire), key);
}

} // namespace ekb
