#include "ekb/image.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "ekb/error.hpp"

namespace ekb {

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t next_number()
    {
        skip_space_and_comments();
        std::size_t value = 0;
        std::size_t digits = 0;
        while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
            value = value * 10 + (data_[pos_] - '0');
            if (++digits > 9) {
                throw Error(Errc::MalformedImage, "PGM header number too large");
            }
            ++pos_;
        }
        if (digits == 0) {
            throw Error(Errc::MalformedImage, "PGM header: expected a number");
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset()
    {
        if (pos_ >= data_.size() || !std::isspace(data_[pos_])) {
            throw Error(Errc::MalformedImage, "PGM header: missing separator before raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < data_.size()) {
            if (std::isspace(data_[pos_])) {
                ++pos_;
            } else if (data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 2;
};

} // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> data)
{
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
        throw Error(Errc::MalformedImage, "not a binary PGM (P5)");
    }
    HeaderReader header(data);
    const std::size_t width = header.next_number();
    const std::size_t height = header.next_number();
    const std::size_t maxval = header.next_number();
    if (maxval != 255) {
        throw Error(Errc::MalformedImage, "only maxval 255 is supported");
    }
    if (width == 0 || height == 0) {
        throw Error(Errc::MalformedImage, "PGM has zero dimension");
    }
    const std::size_t offset = header.raster_offset();
    if (data.size() - offset < width * height) {
        throw Error(Errc::MalformedImage, "PGM raster truncated");
    }
    GrayImage img(width, height);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(offset), width * height, img.pixels.begin());
    return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img)
{
    const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img)
{
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(Errc::Io, "cannot write image " + path.string());
    }
}

} // namespace ekb
