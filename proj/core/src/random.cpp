#include "ekb/random.hpp"

#include <openssl/rand.h>

#include "ekb/error.hpp"

namespace ekb {

namespace {
__extension__ typedef unsigned __int128 u128;
} // namespace

void RandomSource::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = next_u64();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word & 0xFF);
            word >>= 8;
        }
    }
}

std::vector<std::uint8_t> RandomSource::bytes(std::size_t n)
{
    std::vector<std::uint8_t> out(n);
    fill(out);
    return out;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound)
{
    if (bound == 0) {
        throw Error(Errc::InvalidArgument, "uniform: bound must be positive");
    }
    // Lemire's multiply-shift with rejection.
    u128 m = static_cast<u128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::unit()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RandomSource::bernoulli(double p)
{
    if (p <= 0.0) {
        return false;
    }
    if (p >= 1.0) {
        return true;
    }
    return unit() < p;
}

std::uint64_t SystemRng::next_u64()
{
    std::uint64_t word = 0;
    if (RAND_bytes(reinterpret_cast<unsigned char*>(&word), sizeof word) != 1) {
        throw Error(Errc::Io, "system random source unavailable");
    }
    return word;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    // splitmix64 finalizer over a combined state
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace ekb
