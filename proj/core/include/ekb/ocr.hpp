#pragma once

#include <array>
#include <bitset>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ekb/crypto.hpp"
#include "ekb/image.hpp"
#include "ekb/random.hpp"

namespace ekb::ocr {

inline constexpr std::size_t kGlyphWidth = 5;
inline constexpr std::size_t kGlyphHeight = 7;
inline constexpr std::size_t kGlyphCells = kGlyphWidth * kGlyphHeight;
// One blank column between glyphs, one blank row between lines.
inline constexpr std::size_t kColumnPitch = kGlyphWidth + 1;
inline constexpr std::size_t kRowPitch = kGlyphHeight + 1;
inline constexpr std::uint8_t kBinarizeThreshold = 128;
// A cell with this many dark pixels or fewer is treated as empty.
inline constexpr std::size_t kBlankInk = 3;

// Bit (row * 5 + col) set means ink.
using Glyph = std::bitset<kGlyphCells>;

// 5x7 bitmaps for "0123456789ABCDEF", in that order.
class GlyphFont {
public:
    explicit GlyphFont(const std::array<Glyph, 16>& glyphs);

    static const GlyphFont& standard();

    const Glyph& glyph(std::size_t index) const { return glyphs_[index]; }
    // nullptr if `c` is not in the whitelist.
    const Glyph* glyph_for(char c) const;

private:
    std::array<Glyph, 16> glyphs_;
};

struct RenderOptions {
    std::size_t scale = 1;
    std::size_t wrap_width = 64;
};

struct Layout {
    std::size_t rows;
    std::size_t columns;
};

// Lines come from explicit newlines, each wrapped every wrap_width characters.
// Spaces and any non-whitelist character occupy a blank cell.
Layout layout_of(std::string_view text, std::size_t wrap_width);

// width  = (6 * max(columns, 1) - 1) * scale
// height = (8 * rows - 1) * scale
GrayImage render_armored(std::string_view text, const GlyphFont& font, const RenderOptions& options = {});

struct Recognition {
    // Recognized characters; visual rows are joined with '\n'.
    std::string text;
    // One score per non-newline character: 1 - hamming / 35.
    std::vector<double> scores;
};

class Recognizer {
public:
    virtual ~Recognizer() = default;
    virtual Recognition recognize(const GrayImage& img) const = 0;
};

// Nearest-template classifier over the fixed render grid. Ties go to the
// lower alphabet index.
class TemplateRecognizer final : public Recognizer {
public:
    TemplateRecognizer(const GlyphFont& font, std::size_t scale = 1);

    Recognition recognize(const GrayImage& img) const override;

private:
    const GlyphFont& font_;
    std::size_t scale_;
};

Recognition recognize_hex(const GrayImage& img, const GlyphFont& font, std::size_t scale = 1);

GrayImage flip_pixels(const GrayImage& img, double p, RandomSource& rng);

// Recognize, pull candidate hex runs, and decrypt the first run that is a
// well-formed envelope. Throws NoCiphertextFound, or the first decrypt error
// if every well-formed envelope failed to decrypt.
Decrypted auto_decrypt(const GrayImage& img, const SecretKey& key, const Recognizer& recognizer);
Decrypted auto_decrypt(const GrayImage& img, const SecretKey& key, const GlyphFont& font, std::size_t scale = 1);

std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - edit_distance / max(|reference|, 1), clamped to [0, 1].
double ocr_accuracy(std::string_view reference, std::string_view recognized);

class CaptureSource {
public:
    virtual ~CaptureSource() = default;
    virtual GrayImage latest_frame() = 0;
};

// Re-reads the PGM at `path` on every call, so an overwritten screenshot is
// picked up. Throws FrameUnavailable or MalformedImage.
class FileCaptureSource final : public CaptureSource {
public:
    explicit FileCaptureSource(std::filesystem::path path) : path_(std::move(path)) {}

    GrayImage latest_frame() override;

private:
    std::filesystem::path path_;
};

} // namespace ekb::ocr
