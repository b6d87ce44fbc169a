#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ekb {

// 8-bit luminance, row-major, 0 = black.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 255) : width(w), height(h), pixels(w * h, fill) {}

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Binary PGM (P5), maxval 255. Header comments are accepted on input.
// Throws Error(MalformedImage).
GrayImage parse_pgm(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);

} // namespace ekb
