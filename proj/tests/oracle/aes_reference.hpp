#pragma once

// Straight-line FIPS-197 AES-128 encryption plus CBC and PKCS#7, written
// without tables or third-party code. Used only to check the library, which
// goes through OpenSSL.

#include <array>
#include <cstdint>
#include <vector>

namespace oracle {

class Aes128 {
public:
    explicit Aes128(const std::array<std::uint8_t, 16>& key)
    {
        build_sbox();
        expand(key);
    }

    std::array<std::uint8_t, 16> encrypt_block(std::array<std::uint8_t, 16> s) const
    {
        add_round_key(s, 0);
        for (int round = 1; round <= 10; ++round) {
            for (auto& b : s) {
                b = sbox_[b];
            }
            shift_rows(s);
            if (round != 10) {
                mix_columns(s);
            }
            add_round_key(s, round);
        }
        return s;
    }

private:
    static std::uint8_t xtime(std::uint8_t x) { return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1B : 0)); }

    static std::uint8_t gmul(std::uint8_t a, std::uint8_t b)
    {
        std::uint8_t p = 0;
        for (int i = 0; i < 8; ++i) {
            if (b & 1) {
                p ^= a;
            }
            a = xtime(a);
            b >>= 1;
        }
        return p;
    }

    void build_sbox()
    {
        for (int x = 0; x < 256; ++x) {
            // multiplicative inverse by exhaustive search
            std::uint8_t inv = 0;
            for (int y = 1; y < 256 && x != 0; ++y) {
                if (gmul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
                    inv = static_cast<std::uint8_t>(y);
                    break;
                }
            }
            std::uint8_t out = 0x63;
            for (int i = 0; i < 8; ++i) {
                const int bit = ((inv >> i) ^ (inv >> ((i + 4) % 8)) ^ (inv >> ((i + 5) % 8)) ^ (inv >> ((i + 6) % 8))
                                 ^ (inv >> ((i + 7) % 8)))
                                & 1;
                out ^= static_cast<std::uint8_t>(bit << i);
            }
            sbox_[static_cast<std::size_t>(x)] = out;
        }
    }

    void expand(const std::array<std::uint8_t, 16>& key)
    {
        for (int i = 0; i < 16; ++i) {
            w_[static_cast<std::size_t>(i)] = key[static_cast<std::size_t>(i)];
        }
        std::uint8_t rcon = 1;
        for (int i = 4; i < 44; ++i) {
            std::array<std::uint8_t, 4> t;
            for (int j = 0; j < 4; ++j) {
                t[static_cast<std::size_t>(j)] = w_[static_cast<std::size_t>((i - 1) * 4 + j)];
            }
            if (i % 4 == 0) {
                t = {sbox_[t[1]], sbox_[t[2]], sbox_[t[3]], sbox_[t[0]]};
                t[0] ^= rcon;
                rcon = xtime(rcon);
            }
            for (int j = 0; j < 4; ++j) {
                w_[static_cast<std::size_t>(i * 4 + j)] =
                    w_[static_cast<std::size_t>((i - 4) * 4 + j)] ^ t[static_cast<std::size_t>(j)];
            }
        }
    }

    void add_round_key(std::array<std::uint8_t, 16>& s, int round) const
    {
        for (int i = 0; i < 16; ++i) {
            s[static_cast<std::size_t>(i)] ^= w_[static_cast<std::size_t>(round * 16 + i)];
        }
    }

    // State is column-major: s[r + 4c].
    static void shift_rows(std::array<std::uint8_t, 16>& s)
    {
        const auto t = s;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                s[static_cast<std::size_t>(r + 4 * c)] = t[static_cast<std::size_t>(r + 4 * ((c + r) % 4))];
            }
        }
    }

    static void mix_columns(std::array<std::uint8_t, 16>& s)
    {
        for (int c = 0; c < 4; ++c) {
            const auto a0 = s[static_cast<std::size_t>(4 * c)];
            const auto a1 = s[static_cast<std::size_t>(4 * c + 1)];
            const auto a2 = s[static_cast<std::size_t>(4 * c + 2)];
            const auto a3 = s[static_cast<std::size_t>(4 * c + 3)];
            s[static_cast<std::size_t>(4 * c)] = gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3;
            s[static_cast<std::size_t>(4 * c + 1)] = a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3;
            s[static_cast<std::size_t>(4 * c + 2)] = a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3);
            s[static_cast<std::size_t>(4 * c + 3)] = gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2);
        }
    }

    std::array<std::uint8_t, 256> sbox_{};
    std::array<std::uint8_t, 176> w_{};
};

inline std::vector<std::uint8_t> cbc_pkcs7_encrypt(const std::array<std::uint8_t, 16>& key,
                                                   const std::array<std::uint8_t, 16>& iv,
                                                   const std::vector<std::uint8_t>& plaintext)
{
    const Aes128 aes(key);
    std::vector<std::uint8_t> data = plaintext;
    const auto pad = static_cast<std::uint8_t>(16 - plaintext.size() % 16);
    data.insert(data.end(), pad, pad);

    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 16> chain = iv;
    for (std::size_t off = 0; off < data.size(); off += 16) {
        std::array<std::uint8_t, 16> block;
        for (std::size_t i = 0; i < 16; ++i) {
            block[i] = data[off + i] ^ chain[i];
        }
        chain = aes.encrypt_block(block);
        out.insert(out.end(), chain.begin(), chain.end());
    }
    return out;
}

} // namespace oracle
