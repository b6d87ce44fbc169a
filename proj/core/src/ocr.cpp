#include "ekb/ocr.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>

#include "ekb/armor.hpp"
#include "ekb/error.hpp"

namespace ekb::ocr {

namespace {

constexpr std::array<std::array<std::string_view, kGlyphHeight>, 16> kStandardBitmaps = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},  // 0
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},  // 1
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},  // 2
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},  // 3
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},  // 4
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},  // 5
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},  // 6
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},  // 7
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},  // 8
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},  // 9
    {"01110", "10001", "10001", "10001", "11111", "10001", "10001"},  // A
    {"11110", "10001", "10001", "11110", "10001", "10001", "11110"},  // B
    {"01110", "10001", "10000", "10000", "10000", "10001", "01110"},  // C
    {"11100", "10010", "10001", "10001", "10001", "10010", "11100"},  // D
    {"11111", "10000", "10000", "11110", "10000", "10000", "11111"},  // E
    {"11111", "10000", "10000", "11110", "10000", "10000", "10000"},  // F
}};

std::array<Glyph, 16> build_standard()
{
    std::array<Glyph, 16> glyphs;
    for (std::size_t g = 0; g < glyphs.size(); ++g) {
        for (std::size_t y = 0; y < kGlyphHeight; ++y) {
            for (std::size_t x = 0; x < kGlyphWidth; ++x) {
                glyphs[g][y * kGlyphWidth + x] = kStandardBitmaps[g][y][x] == '1';
            }
        }
    }
    return glyphs;
}

std::vector<std::string_view> visual_rows(std::string_view text, std::size_t wrap_width)
{
    if (wrap_width == 0) {
        throw Error(Errc::InvalidArgument, "wrap width must be at least 1");
    }
    std::vector<std::string_view> rows;
    std::size_t start = 0;
    while (true) {
        auto end = text.find('\n', start);
        const auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (line.empty()) {
            rows.push_back(line);
        }
        for (std::size_t off = 0; off < line.size(); off += wrap_width) {
            rows.push_back(line.substr(off, wrap_width));
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return rows;
}

} // namespace

GlyphFont::GlyphFont(const std::array<Glyph, 16>& glyphs) : glyphs_(glyphs)
{
    for (std::size_t i = 0; i < glyphs_.size(); ++i) {
        for (std::size_t j = i + 1; j < glyphs_.size(); ++j) {
            if (glyphs_[i] == glyphs_[j]) {
                throw Error(Errc::InvalidArgument, "glyph templates must be pairwise distinct");
            }
        }
    }
}

const GlyphFont& GlyphFont::standard()
{
    static const GlyphFont font(build_standard());
    return font;
}

const Glyph* GlyphFont::glyph_for(char c) const
{
    const auto idx = armor::kAlphabet.find(c);
    return idx == std::string_view::npos ? nullptr : &glyphs_[idx];
}

Layout layout_of(std::string_view text, std::size_t wrap_width)
{
    const auto rows = visual_rows(text, wrap_width);
    std::size_t columns = 0;
    for (auto row : rows) {
        columns = std::max(columns, row.size());
    }
    return {rows.size(), columns};
}

GrayImage render_armored(std::string_view text, const GlyphFont& font, const RenderOptions& options)
{
    if (options.scale == 0) {
        throw Error(Errc::InvalidArgument, "scale must be at least 1");
    }
    const std::size_t s = options.scale;
    const auto rows = visual_rows(text, options.wrap_width);
    const auto layout = layout_of(text, options.wrap_width);

    GrayImage img((kColumnPitch * std::max<std::size_t>(layout.columns, 1) - 1) * s,
                  (kRowPitch * layout.rows - 1) * s);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t k = 0; k < rows[r].size(); ++k) {
            const Glyph* glyph = font.glyph_for(rows[r][k]);
            if (glyph == nullptr) {
                continue;
            }
            for (std::size_t gy = 0; gy < kGlyphHeight; ++gy) {
                for (std::size_t gx = 0; gx < kGlyphWidth; ++gx) {
                    if (!(*glyph)[gy * kGlyphWidth + gx]) {
                        continue;
                    }
                    const std::size_t x0 = (k * kColumnPitch + gx) * s;
                    const std::size_t y0 = (r * kRowPitch + gy) * s;
                    for (std::size_t dy = 0; dy < s; ++dy) {
                        std::fill_n(img.pixels.begin() + static_cast<std::ptrdiff_t>((y0 + dy) * img.width + x0), s,
                                    std::uint8_t{0});
                    }
                }
            }
        }
    }
    return img;
}

TemplateRecognizer::TemplateRecognizer(const GlyphFont& font, std::size_t scale) : font_(font), scale_(scale)
{
    if (scale_ == 0) {
        throw Error(Errc::InvalidArgument, "scale must be at least 1");
    }
}

Recognition TemplateRecognizer::recognize(const GrayImage& img) const
{
    const std::size_t s = scale_;
    const std::size_t columns = (img.width / s + 1) / kColumnPitch;
    const std::size_t rows = (img.height / s + 1) / kRowPitch;

    Recognition out;
    for (std::size_t r = 0; r < rows; ++r) {
        if (r > 0) {
            out.text.push_back('\n');
        }
        for (std::size_t k = 0; k < columns; ++k) {
            Glyph cell;
            for (std::size_t gy = 0; gy < kGlyphHeight; ++gy) {
                for (std::size_t gx = 0; gx < kGlyphWidth; ++gx) {
                    const std::size_t x0 = (k * kColumnPitch + gx) * s;
                    const std::size_t y0 = (r * kRowPitch + gy) * s;
                    std::size_t sum = 0;
                    for (std::size_t dy = 0; dy < s; ++dy) {
                        for (std::size_t dx = 0; dx < s; ++dx) {
                            sum += img.at(x0 + dx, y0 + dy);
                        }
                    }
                    cell[gy * kGlyphWidth + gx] = sum < static_cast<std::size_t>(kBinarizeThreshold) * s * s;
                }
            }
            if (cell.count() <= kBlankInk) {
                continue;
            }
            std::size_t best = 0;
            std::size_t best_distance = kGlyphCells + 1;
            for (std::size_t g = 0; g < 16; ++g) {
                const std::size_t d = (cell ^ font_.glyph(g)).count();
                if (d < best_distance) {
                    best = g;
                    best_distance = d;
                }
            }
            out.text.push_back(armor::kAlphabet[best]);
            out.scores.push_back(1.0 - static_cast<double>(best_distance) / static_cast<double>(kGlyphCells));
        }
    }

    // Blank rows at the edges carry no text.
    const auto first = out.text.find_first_not_of('\n');
    if (first == std::string::npos) {
        out.text.clear();
    } else {
        const auto last = out.text.find_last_not_of('\n');
        out.text = out.text.substr(first, last - first + 1);
    }
    return out;
}

Recognition recognize_hex(const GrayImage& img, const GlyphFont& font, std::size_t scale)
{
    return TemplateRecognizer(font, scale).recognize(img);
}

GrayImage flip_pixels(const GrayImage& img, double p, RandomSource& rng)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(Errc::InvalidArgument, "flip probability must lie in [0, 1]");
    }
    GrayImage out = img;
    for (auto& px : out.pixels) {
        if (rng.bernoulli(p)) {
            px = static_cast<std::uint8_t>(255 - px);
        }
    }
    return out;
}

Decrypted auto_decrypt(const GrayImage& img, const SecretKey& key, const Recognizer& recognizer)
{
    const auto recognized = recognizer.recognize(img);
    std::optional<Error> first_failure;
    for (const auto& run : armor::extract_hex_runs(recognized.text)) {
        Envelope env;
        try {
            env = Envelope::parse(armor::decode_strict(run));
        } catch (const Error&) {
            continue;
        }
        try {
            return decrypt(env, key);
        } catch (const Error& e) {
            if (!first_failure) {
                first_failure = e;
            }
        }
    }
    if (first_failure) {
        throw *first_failure;
    }
    throw Error(Errc::NoCiphertextFound, "no recognized text run forms a valid envelope");
}

Decrypted auto_decrypt(const GrayImage& img, const SecretKey& key, const GlyphFont& font, std::size_t scale)
{
    return auto_decrypt(img, key, TemplateRecognizer(font, scale));
}

std::size_t levenshtein(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double ocr_accuracy(std::string_view reference, std::string_view recognized)
{
    const double distance = static_cast<double>(levenshtein(reference, recognized));
    const double denom = static_cast<double>(std::max<std::size_t>(reference.size(), 1));
    return std::clamp(1.0 - distance / denom, 0.0, 1.0);
}

GrayImage FileCaptureSource::latest_frame()
{
    std::ifstream in(path_, std::ios::binary);
    if (!in) {
        throw Error(Errc::FrameUnavailable, "no frame at " + path_.string());
    }
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_pgm(data);
}

} // namespace ekb::ocr
