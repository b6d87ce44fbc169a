#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ekb {

// Source of random 64-bit words. Derived helpers are defined here (not via
// <random> distributions) so seeded streams are identical on every platform.
class RandomSource {
public:
    virtual ~RandomSource() = default;

    virtual std::uint64_t next_u64() = 0;

    void fill(std::span<std::uint8_t> out);
    std::vector<std::uint8_t> bytes(std::size_t n);

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound);

    // Uniform in [0, 1) with 53 bits of resolution.
    double unit();

    bool bernoulli(double p);
};

// Deterministic stream: mt19937_64 is fully specified by the standard.
class SeededRng final : public RandomSource {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() override { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Operating-system entropy, for keys and IVs when no seed is requested.
class SystemRng final : public RandomSource {
public:
    std::uint64_t next_u64() override;
};

// Mixes (seed, index) into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

} // namespace ekb
