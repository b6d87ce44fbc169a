#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ekb/crypto.hpp"
#include "ekb/image.hpp"

namespace ekb::css {

// Perceptual matches at or below this Hamming distance are flagged.
inline constexpr unsigned kPerceptualThreshold = 10;

// 64-bit difference hash. The image is mean-pooled to a 9x8 grid and bit
// (r, c) is set iff cell(r, c) < cell(r, c + 1); bit (r, c) is stored at
// position 63 - (8r + c), so row 0 occupies the most significant byte.
// Throws ImageTooSmall below 2x1.
std::uint64_t dhash(const GrayImage& img);

unsigned hamming_distance(std::uint64_t a, std::uint64_t b) noexcept;

// Words worth adding to a keyword list for a plaintext: lowercase alphabetic
// tokens of four or more letters that contain at least one letter outside
// a-f. Pure a-f words ("face", "decade") would fire on random armored hex
// and are left out.
std::vector<std::string> extract_keywords(std::string_view plaintext);

class ScanDatabase {
public:
    void add_exact_payload(ByteView payload) { exact_hashes_.insert(sha256(payload)); }
    void add_exact_digest(const Sha256Digest& digest) { exact_hashes_.insert(digest); }
    void add_perceptual(std::uint64_t hash) { perceptual_hashes_.insert(hash); }
    // Stored lowercase; duplicates are ignored.
    void add_keyword(std::string_view keyword);

    const std::set<Sha256Digest>& exact_hashes() const noexcept { return exact_hashes_; }
    const std::set<std::uint64_t>& perceptual_hashes() const noexcept { return perceptual_hashes_; }
    const std::vector<std::string>& keywords() const noexcept { return keywords_; }

    bool empty() const noexcept
    {
        return exact_hashes_.empty() && perceptual_hashes_.empty() && keywords_.empty();
    }

    // Text format with "[exact]", "[perceptual]" and "[keywords]" sections;
    // '#' starts a comment line. Throws ConfigInvalid on bad input.
    std::string serialize() const;
    static ScanDatabase parse(std::string_view text);
    static ScanDatabase load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    friend bool operator==(const ScanDatabase&, const ScanDatabase&) = default;

private:
    std::set<Sha256Digest> exact_hashes_;
    std::set<std::uint64_t> perceptual_hashes_;
    std::vector<std::string> keywords_;
};

enum class Outcome { Clean, Flagged };

struct ScanVerdict {
    Outcome outcome = Outcome::Clean;
    std::optional<std::string> reason;  // set iff Flagged

    static ScanVerdict clean() { return {}; }
    static ScanVerdict flagged(std::string reason) { return {Outcome::Flagged, std::move(reason)}; }

    bool is_flagged() const noexcept { return outcome == Outcome::Flagged; }

    friend bool operator==(const ScanVerdict&, const ScanVerdict&) = default;
};

// Exact hash first, then perceptual (Image payloads that parse as PGM), then
// keywords (Text payloads, case-insensitive substring). Throws
// InvalidArgument on an empty payload.
ScanVerdict scan(const ScanDatabase& db, MediaType media, ByteView payload);

struct Channel {
    std::string name;
    ScanDatabase db;
};

enum class Endpoint { Sender, Receiver };

std::string_view to_string(Endpoint endpoint) noexcept;

struct DeliveryReport {
    ScanVerdict sender_verdict;
    std::optional<ScanVerdict> receiver_verdict;  // absent when blocked at the sender
    std::optional<Endpoint> blocked_at;
    Bytes delivered_payload;  // what reached the receiving device

    bool delivered() const noexcept { return !blocked_at.has_value(); }
};

// Scans before sending and again after receipt. A sender-side flag stops the
// message; a receiver-side flag withholds it after it arrived.
DeliveryReport channel_send(const Channel& channel, std::string_view sender, std::string_view receiver,
                            MediaType media, ByteView payload);

} // namespace ekb::css
