#include "doctest.h"

#include <cmath>

#include "ekb/armor.hpp"
#include "ekb/crypto.hpp"
#include "ekb/error.hpp"
#include "oracle/aes_reference.hpp"

using namespace ekb;

namespace {

Bytes hex(std::string_view s) { return armor::decode_strict(s); }

template <std::size_t N>
std::array<std::uint8_t, N> hex_array(std::string_view s)
{
    const auto b = hex(s);
    std::array<std::uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

Errc error_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ekb::Error");
    return Errc::Io;
}

} // namespace

TEST_CASE("generate_key is deterministic under a seed and 16 bytes long")
{
    SeededRng a(0);
    SeededRng b(0);
    SeededRng c(1);
    const auto k0 = generate_key(a);
    CHECK(k0 == generate_key(b));
    CHECK_FALSE(k0 == generate_key(c));
    CHECK(k0.bytes().size() == 16);
}

TEST_CASE("key hex export round-trips and rejects bad input")
{
    SeededRng rng(7);
    const auto key = generate_key(rng);
    const auto text = key.to_hex();
    CHECK(text.size() == 32);
    CHECK(text.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(SecretKey::from_hex(text) == key);
    CHECK(error_of([] { SecretKey::from_hex("abcd"); }) == Errc::BadKey);
    CHECK(error_of([] { SecretKey::from_hex(std::string(31, 'a') + "g"); }) == Errc::BadKey);
}

TEST_CASE("ciphertext length follows PKCS#7 block arithmetic")
{
    SeededRng rng(3);
    const auto key = generate_key(rng);
    CHECK(encrypt({}, MediaType::Text, key, rng).ciphertext.size() == 16);
    CHECK(encrypt(Bytes(16, 1), MediaType::Text, key, rng).ciphertext.size() == 32);
    for (std::size_t len = 0; len <= 4096; len += 7) {
        const auto env = encrypt(Bytes(len, 0xAB), MediaType::Video, key, rng);
        REQUIRE(env.ciphertext.size() == 16 * ((len + 1 + 15) / 16));
        CHECK(env.ciphertext.size() == ciphertext_size(len));
    }
}

TEST_CASE("standard CBC vector (SP 800-38A F.2.1) plus trailing pad block")
{
    const SecretKey key(hex_array<16>("2b7e151628aed2a6abf7158809cf4f3c"));
    const auto iv = hex_array<16>("000102030405060708090a0b0c0d0e0f");
    const auto plaintext = hex("6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
                               "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710");
    const auto env = encrypt_with_iv(plaintext, MediaType::Text, key, iv);
    CHECK(to_hex_lower(env.ciphertext)
          == "7649abac8119b246cee98e9b12e9197d5086cb9b507219ee95db113a917678b2"
             "73bed6b8e3c1743b7116e69e222295163ff1caa1681fac09120eca307586e1a7"
             "8cb82807230e1321d3fae00d18cc2012");
}

TEST_CASE("reference oracle reproduces the FIPS-197 single-block vector")
{
    const oracle::Aes128 aes(hex_array<16>("000102030405060708090a0b0c0d0e0f"));
    const auto out = aes.encrypt_block(hex_array<16>("00112233445566778899aabbccddeeff"));
    CHECK(to_hex_lower(out) == "69c4e0d86a7b0430d8cdb78070b4c55a");
}

TEST_CASE("encryption matches the independent AES-CBC oracle on random cases")
{
    SeededRng rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        std::array<std::uint8_t, 16> k{};
        Iv iv{};
        rng.fill(k);
        rng.fill(iv);
        const auto pt = rng.bytes(rng.uniform(300));
        const auto env = encrypt_with_iv(pt, MediaType::Image, SecretKey(k), iv);
        REQUIRE(env.ciphertext == oracle::cbc_pkcs7_encrypt(k, iv, pt));
    }
}

TEST_CASE("round trip across media types and lengths")
{
    SeededRng rng(11);
    const auto key = generate_key(rng);
    for (auto media : kAllMediaTypes) {
        for (std::size_t len : {0, 1, 15, 16, 17, 255, 4096}) {
            const auto pt = rng.bytes(len);
            const auto wire = encrypt(pt, media, key, rng).serialize();
            const auto out = decrypt(ByteView(wire), key);
            CHECK(out.media == media);
            CHECK(out.plaintext == pt);
        }
    }
}

TEST_CASE("round trip of a 1 MiB payload")
{
    SeededRng rng(12);
    const auto key = generate_key(rng);
    const auto pt = rng.bytes(1 << 20);
    CHECK(decrypt(encrypt(pt, MediaType::Video, key, rng), key).plaintext == pt);
}

TEST_CASE("fresh IV per message")
{
    SeededRng rng(5);
    const auto key = generate_key(rng);
    const Bytes pt(40, 'x');
    for (int i = 0; i < 100; ++i) {
        const auto a = encrypt(pt, MediaType::Text, key, rng);
        const auto b = encrypt(pt, MediaType::Text, key, rng);
        REQUIRE(a.iv != b.iv);
        REQUIRE(a.ciphertext != b.ciphertext);
    }
}

TEST_CASE("envelope wire layout is bit-exact")
{
    const SecretKey key(hex_array<16>("000102030405060708090a0b0c0d0e0f"));
    const auto iv = hex_array<16>("f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff");
    const auto env = encrypt_with_iv(as_bytes("hi"), MediaType::VoiceMemo, key, iv);
    const auto wire = env.serialize();
    REQUIRE(wire.size() == 21 + 16);
    CHECK(std::string(wire.begin(), wire.begin() + 4) == "EKB1");
    CHECK(wire[4] == 3);
    CHECK(std::equal(iv.begin(), iv.end(), wire.begin() + 5));
    CHECK(Envelope::parse(wire) == env);
}

TEST_CASE("structural errors")
{
    SeededRng rng(9);
    const auto key = generate_key(rng);
    auto wire = encrypt(as_bytes("hello"), MediaType::Text, key, rng).serialize();

    SUBCASE("bad magic")
    {
        wire[0] = 'X';
        CHECK(error_of([&] { decrypt(ByteView(wire), key); }) == Errc::BadMagic);
        CHECK(error_of([&] { Envelope::parse(Bytes{'E', 'K'}); }) == Errc::BadMagic);
    }
    SUBCASE("truncated ciphertext")
    {
        wire.resize(Envelope::kHeaderSize + 8);
        CHECK(error_of([&] { decrypt(ByteView(wire), key); }) == Errc::BadLength);
    }
    SUBCASE("header only")
    {
        wire.resize(Envelope::kHeaderSize);
        CHECK(error_of([&] { Envelope::parse(wire); }) == Errc::BadLength);
    }
    SUBCASE("unknown media tag")
    {
        wire[4] = 9;
        CHECK(error_of([&] { Envelope::parse(wire); }) == Errc::BadMediaTag);
    }
}

TEST_CASE("wrong key fails padding at about 255/256")
{
    SeededRng rng(77);
    const auto key = generate_key(rng);
    const auto env = encrypt(rng.bytes(40), MediaType::Text, key, rng);
    constexpr int kTrials = 1000;
    int bad_padding = 0;
    for (int i = 0; i < kTrials; ++i) {
        try {
            decrypt(env, generate_key(rng));
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::BadPadding);
            ++bad_padding;
        }
    }
    const double p = 255.0 / 256.0;
    const double sigma = std::sqrt(p * (1 - p) / kTrials);
    CHECK(std::fabs(bad_padding / double(kTrials) - p) <= 3 * sigma);
}

TEST_CASE("media type names parse")
{
    CHECK(parse_media_type("voice-memo") == MediaType::VoiceMemo);
    CHECK(parse_media_type("IMAGE") == MediaType::Image);
    CHECK_FALSE(parse_media_type("gif").has_value());
}
