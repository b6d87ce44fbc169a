#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ekb/crypto.hpp"
#include "ekb/css.hpp"
#include "ekb/ocr.hpp"
#include "ekb/random.hpp"

namespace ekb::css {

// Which rule kinds a named scanner configuration applies.
struct ScannerConfig {
    std::string name;
    bool exact = true;
    bool perceptual = false;
    bool keywords = false;
};

struct EvalCase {
    MediaType media;
    std::string sender;
    std::string channel;
    std::string receiver;
};

struct EvaluationConfig {
    std::vector<std::string> agents;
    std::vector<ScannerConfig> scanners;
    std::vector<EvalCase> schedule;

    bool encrypt = true;
    // Seed every scanner with the scheduled plaintexts so that unencrypted
    // sends are known-bad content.
    bool seed_database = true;
    // Extra rules shared by every scanner.
    ScanDatabase base_database;

    std::vector<std::string> text_messages;
    std::size_t image_side = 32;
    std::size_t audio_bytes = 4096;
    std::size_t voice_memo_bytes = 2048;
    std::size_t video_bytes = 16384;
    ocr::RenderOptions render;

    // Three agents, three scanner configurations and 15 cases: each media
    // type three times, rotating sender/receiver pairs.
    static EvaluationConfig table_default();

    // Line-based "key = value" document applied on top of table_default().
    // Keys: agents, scanners, schedule, encrypt, seed_database,
    // text_messages, image_side, audio_bytes, voice_memo_bytes, video_bytes,
    // scale, wrap_width. Throws ConfigInvalid.
    static EvaluationConfig parse(std::string_view text);

    // Throws ConfigInvalid.
    void validate() const;
};

// Builds the 15-case schedule over the first three agents/scanners, reusing
// names cyclically when fewer are configured.
std::vector<EvalCase> default_schedule(const std::vector<std::string>& agents,
                                       const std::vector<ScannerConfig>& scanners);

enum class Status { Successful, Failed };

std::string_view to_string(Status status) noexcept;

struct EvalRow {
    std::size_t message_no;
    MediaType media;
    Status encryption_status;
    std::string sender;
    std::string channel;
    std::string receiver;
    std::optional<double> ocr_accuracy;  // Text rows that reached the receiver
    Status decryption_status;
    ScanVerdict sender_verdict;
    std::optional<ScanVerdict> receiver_verdict;
    std::optional<Endpoint> blocked_at;

    friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

std::vector<EvalRow> run_evaluation(const EvaluationConfig& config, RandomSource& rng);

std::string format_table(const std::vector<EvalRow>& rows);
std::string to_json(const std::vector<EvalRow>& rows);

} // namespace ekb::css
