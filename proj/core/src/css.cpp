#include "ekb/css.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ekb/armor.hpp"
#include "ekb/error.hpp"

namespace ekb::css {

namespace {

std::string lowercase(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string hex64(std::uint64_t v)
{
    std::array<std::uint8_t, 8> be{};
    for (int i = 0; i < 8; ++i) {
        be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    }
    return to_hex_lower(be);
}

} // namespace

std::uint64_t dhash(const GrayImage& img)
{
    constexpr std::size_t kCols = 9;
    constexpr std::size_t kRows = 8;
    if (img.width < 2 || img.height < 1) {
        throw Error(Errc::ImageTooSmall, "dhash needs an image of at least 2x1");
    }

    auto span_of = [](std::size_t i, std::size_t cells, std::size_t extent) {
        const std::size_t lo = i * extent / cells;
        const std::size_t hi = std::max(lo + 1, (i + 1) * extent / cells);
        return std::pair{lo, std::min(hi, extent)};
    };

    std::array<std::array<double, kCols>, kRows> grid{};
    for (std::size_t r = 0; r < kRows; ++r) {
        const auto [y0, y1] = span_of(r, kRows, img.height);
        for (std::size_t c = 0; c < kCols; ++c) {
            const auto [x0, x1] = span_of(c, kCols, img.width);
            std::uint64_t sum = 0;
            for (std::size_t y = y0; y < y1; ++y) {
                for (std::size_t x = x0; x < x1; ++x) {
                    sum += img.at(x, y);
                }
            }
            grid[r][c] = static_cast<double>(sum) / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }

    std::uint64_t hash = 0;
    for (std::size_t r = 0; r < kRows; ++r) {
        for (std::size_t c = 0; c + 1 < kCols; ++c) {
            hash <<= 1;
            if (grid[r][c] < grid[r][c + 1]) {
                hash |= 1;
            }
        }
    }
    return hash;
}

unsigned hamming_distance(std::uint64_t a, std::uint64_t b) noexcept
{
    return static_cast<unsigned>(std::popcount(a ^ b));
}

std::vector<std::string> extract_keywords(std::string_view plaintext)
{
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        const bool long_enough = word.size() >= 4;
        const bool not_hex = std::any_of(word.begin(), word.end(), [](char c) { return c > 'f'; });
        if (long_enough && not_hex && std::find(out.begin(), out.end(), word) == out.end()) {
            out.push_back(word);
        }
        word.clear();
    };
    for (char ch : plaintext) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
            word.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

void ScanDatabase::add_keyword(std::string_view keyword)
{
    auto kw = lowercase(keyword);
    if (kw.empty()) {
        throw Error(Errc::InvalidArgument, "keyword must not be empty");
    }
    if (std::find(keywords_.begin(), keywords_.end(), kw) == keywords_.end()) {
        keywords_.push_back(std::move(kw));
    }
}

std::string ScanDatabase::serialize() const
{
    std::ostringstream out;
    out << "# scan database\n[exact]\n";
    for (const auto& d : exact_hashes_) {
        out << to_hex_lower(d) << '\n';
    }
    out << "[perceptual]\n";
    for (auto h : perceptual_hashes_) {
        out << hex64(h) << '\n';
    }
    out << "[keywords]\n";
    for (const auto& k : keywords_) {
        out << k << '\n';
    }
    return out.str();
}

ScanDatabase ScanDatabase::parse(std::string_view text)
{
    enum class Section { None, Exact, Perceptual, Keywords };
    ScanDatabase db;
    Section section = Section::None;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) {
        throw Error(Errc::ConfigInvalid, "scan database line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line == "[exact]") {
            section = Section::Exact;
        } else if (line == "[perceptual]") {
            section = Section::Perceptual;
        } else if (line == "[keywords]") {
            section = Section::Keywords;
        } else if (section == Section::Exact) {
            if (line.size() != 64) {
                fail("exact digest must be 64 hex characters");
            }
            std::vector<std::uint8_t> bytes;
            try {
                bytes = armor::decode_strict(line);
            } catch (const Error&) {
                fail("exact digest is not hex");
            }
            Sha256Digest d{};
            std::copy(bytes.begin(), bytes.end(), d.begin());
            db.add_exact_digest(d);
        } else if (section == Section::Perceptual) {
            if (line.size() != 16 || !std::all_of(line.begin(), line.end(), armor::is_hex_digit)) {
                fail("perceptual hash must be 16 hex characters");
            }
            db.add_perceptual(std::stoull(line, nullptr, 16));
        } else if (section == Section::Keywords) {
            db.add_keyword(line);
        } else {
            fail("entry outside of any section");
        }
    }
    return db;
}

ScanDatabase ScanDatabase::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::Io, "cannot read scan database " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ScanDatabase::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << serialize();
    if (!out) {
        throw Error(Errc::Io, "cannot write scan database " + path.string());
    }
}

ScanVerdict scan(const ScanDatabase& db, MediaType media, ByteView payload)
{
    if (payload.empty()) {
        throw Error(Errc::InvalidArgument, "scan: payload must not be empty");
    }
    const auto digest = sha256(payload);
    if (db.exact_hashes().contains(digest)) {
        return ScanVerdict::flagged("exact-hash " + to_hex_lower(digest));
    }

    if (media == MediaType::Image && !db.perceptual_hashes().empty()) {
        std::optional<std::uint64_t> hash;
        try {
            hash = dhash(parse_pgm(payload));
        } catch (const Error&) {
            // not an image the scanner understands
        }
        if (hash) {
            for (auto known : db.perceptual_hashes()) {
                const unsigned d = hamming_distance(*hash, known);
                if (d <= kPerceptualThreshold) {
                    return ScanVerdict::flagged("perceptual-hash " + hex64(known) + " distance " + std::to_string(d));
                }
            }
        }
    }

    if (media == MediaType::Text && !db.keywords().empty()) {
        const auto text = lowercase(std::string_view(reinterpret_cast<const char*>(payload.data()), payload.size()));
        for (const auto& kw : db.keywords()) {
            if (text.find(kw) != std::string::npos) {
                return ScanVerdict::flagged("keyword \"" + kw + "\"");
            }
        }
    }
    return ScanVerdict::clean();
}

std::string_view to_string(Endpoint endpoint) noexcept
{
    return endpoint == Endpoint::Sender ? "sender" : "receiver";
}

DeliveryReport channel_send(const Channel& channel, std::string_view /*sender*/, std::string_view /*receiver*/,
                            MediaType media, ByteView payload)
{
    DeliveryReport report;
    report.sender_verdict = scan(channel.db, media, payload);
    if (report.sender_verdict.is_flagged()) {
        report.blocked_at = Endpoint::Sender;
        return report;
    }
    report.delivered_payload.assign(payload.begin(), payload.end());
    report.receiver_verdict = scan(channel.db, media, report.delivered_payload);
    if (report.receiver_verdict->is_flagged()) {
        report.blocked_at = Endpoint::Receiver;
    }
    return report;
}

} // namespace ekb::css
