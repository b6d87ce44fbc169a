#include "ekb/evaluation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ekb/armor.hpp"
#include "ekb/error.hpp"
#include "json.hpp"

namespace ekb::css {

namespace {

// (sender, receiver) agent indices for the three cases of each media type.
constexpr std::array<std::array<std::pair<std::size_t, std::size_t>, 3>, 5> kTablePairs = {{
    {{{0, 2}, {1, 0}, {2, 1}}},  // Text
    {{{1, 2}, {2, 0}, {0, 1}}},  // Image
    {{{2, 0}, {0, 1}, {1, 2}}},  // Audio
    {{{0, 2}, {1, 0}, {2, 1}}},  // Voice memo
    {{{1, 2}, {2, 0}, {0, 1}}},  // Video
}};

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto end = s.find(sep, start);
        auto piece = trim(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!piece.empty()) {
            out.push_back(std::move(piece));
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

[[noreturn]] void invalid(const std::string& why)
{
    throw Error(Errc::ConfigInvalid, why);
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    invalid(key + ": expected true or false, got '" + v + "'");
}

std::size_t parse_count(const std::string& key, const std::string& v, std::size_t min)
{
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(v, &pos);
    } catch (const std::exception&) {
        invalid(key + ": expected a number, got '" + v + "'");
    }
    if (pos != v.size() || n < min) {
        invalid(key + ": expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    }
    return static_cast<std::size_t>(n);
}

ScannerConfig parse_scanner(const std::string& spec)
{
    const auto colon = spec.find(':');
    ScannerConfig cfg;
    cfg.name = trim(spec.substr(0, colon));
    cfg.exact = false;
    if (cfg.name.empty() || colon == std::string::npos) {
        invalid("scanner '" + spec + "' must look like name:rule+rule");
    }
    for (const auto& rule : split(spec.substr(colon + 1), '+')) {
        if (rule == "exact") cfg.exact = true;
        else if (rule == "perceptual") cfg.perceptual = true;
        else if (rule == "keyword" || rule == "keywords") cfg.keywords = true;
        else invalid("unknown scanner rule '" + rule + "'");
    }
    return cfg;
}

Bytes make_image_payload(std::size_t side, RandomSource& rng)
{
    // Blocky random picture: 8x8-pixel tiles of random luminance.
    GrayImage img(side, side);
    const std::size_t tiles = (side + 7) / 8;
    std::vector<std::uint8_t> shade(tiles * tiles);
    rng.fill(shade);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            img.at(x, y) = shade[(y / 8) * tiles + x / 8];
        }
    }
    return encode_pgm(img);
}

Bytes make_payload(const EvaluationConfig& config, MediaType media, std::size_t text_index, RandomSource& rng)
{
    switch (media) {
    case MediaType::Text: {
        const auto& msg = config.text_messages[text_index % config.text_messages.size()];
        return Bytes(msg.begin(), msg.end());
    }
    case MediaType::Image: return make_image_payload(config.image_side, rng);
    case MediaType::Audio: return rng.bytes(config.audio_bytes);
    case MediaType::VoiceMemo: return rng.bytes(config.voice_memo_bytes);
    case MediaType::Video: return rng.bytes(config.video_bytes);
    }
    return {};
}

std::string accuracy_cell(const std::optional<double>& acc)
{
    if (!acc) {
        return "N/A";
    }
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(*acc == 1.0 ? 0 : 1);
    out << *acc * 100.0 << '%';
    return out.str();
}

} // namespace

std::vector<EvalCase> default_schedule(const std::vector<std::string>& agents,
                                       const std::vector<ScannerConfig>& scanners)
{
    std::vector<EvalCase> schedule;
    if (agents.size() < 2 || scanners.empty()) {
        return schedule;
    }
    for (std::size_t m = 0; m < kAllMediaTypes.size(); ++m) {
        for (std::size_t j = 0; j < 3; ++j) {
            auto [s, r] = kTablePairs[m][j];
            s %= agents.size();
            r %= agents.size();
            if (s == r) {
                r = (s + 1) % agents.size();
            }
            schedule.push_back({kAllMediaTypes[m], agents[s], scanners[j % scanners.size()].name, agents[r]});
        }
    }
    return schedule;
}

EvaluationConfig EvaluationConfig::table_default()
{
    EvaluationConfig config;
    config.agents = {"Samsung Android 4", "Google Pixel", "Samsung Android 5"};
    config.scanners = {
        {"hash-scanner", true, false, false},
        {"perceptual-scanner", true, true, false},
        {"keyword-scanner", true, true, true},
    };
    config.text_messages = {
        "Meet me at the north gate at nine tonight",
        "The rumor spreads faster than the official story",
        "Bring the printed documents to the usual place",
    };
    config.schedule = default_schedule(config.agents, config.scanners);
    return config;
}

EvaluationConfig EvaluationConfig::parse(std::string_view text)
{
    std::map<std::string, std::string> values;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            invalid("config line " + std::to_string(line_no) + ": expected key = value");
        }
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    EvaluationConfig config = table_default();
    bool schedule_given = false;
    for (const auto& [key, value] : values) {
        if (key == "agents") {
            config.agents = split(value, ',');
        } else if (key == "scanners") {
            config.scanners.clear();
            for (const auto& s : split(value, ',')) {
                config.scanners.push_back(parse_scanner(s));
            }
        } else if (key == "schedule") {
            schedule_given = true;
            config.schedule.clear();
            if (value == "default") {
                schedule_given = false;
            } else if (value != "empty") {
                for (const auto& item : split(value, ';')) {
                    auto parts = split(item, '/');
                    if (parts.size() != 4) {
                        invalid("schedule entry '" + item + "' must be media/sender/channel/receiver");
                    }
                    auto media = parse_media_type(parts[0]);
                    if (!media) {
                        invalid("unknown media type '" + parts[0] + "'");
                    }
                    config.schedule.push_back({*media, parts[1], parts[2], parts[3]});
                }
            }
        } else if (key == "encrypt") {
            config.encrypt = parse_bool(key, value);
        } else if (key == "seed_database") {
            config.seed_database = parse_bool(key, value);
        } else if (key == "text_messages") {
            config.text_messages = split(value, '|');
        } else if (key == "image_side") {
            config.image_side = parse_count(key, value, 2);
        } else if (key == "audio_bytes") {
            config.audio_bytes = parse_count(key, value, 1);
        } else if (key == "voice_memo_bytes") {
            config.voice_memo_bytes = parse_count(key, value, 1);
        } else if (key == "video_bytes") {
            config.video_bytes = parse_count(key, value, 1);
        } else if (key == "scale") {
            config.render.scale = parse_count(key, value, 1);
        } else if (key == "wrap_width") {
            config.render.wrap_width = parse_count(key, value, 1);
        } else {
            invalid("unknown config key '" + key + "'");
        }
    }
    if (!schedule_given) {
        config.schedule = default_schedule(config.agents, config.scanners);
    }
    config.validate();
    return config;
}

void EvaluationConfig::validate() const
{
    if (agents.size() < 2) {
        invalid("at least two agents are required");
    }
    if (scanners.empty()) {
        invalid("at least one scanner configuration is required");
    }
    auto has_agent = [&](const std::string& a) { return std::find(agents.begin(), agents.end(), a) != agents.end(); };
    for (const auto& c : schedule) {
        if (!has_agent(c.sender) || !has_agent(c.receiver)) {
            invalid("schedule names an unknown agent: " + c.sender + " -> " + c.receiver);
        }
        if (c.sender == c.receiver) {
            invalid("schedule sends from " + c.sender + " to itself");
        }
        const bool known = std::any_of(scanners.begin(), scanners.end(),
                                       [&](const ScannerConfig& s) { return s.name == c.channel; });
        if (!known) {
            invalid("schedule names an unknown scanner configuration: " + c.channel);
        }
        if (c.media == MediaType::Text && text_messages.empty()) {
            invalid("text cases need at least one text message");
        }
    }
    if (render.scale == 0 || render.wrap_width == 0) {
        invalid("scale and wrap_width must be positive");
    }
}

std::string_view to_string(Status status) noexcept
{
    return status == Status::Successful ? "Successful" : "Failed";
}

std::vector<EvalRow> run_evaluation(const EvaluationConfig& config, RandomSource& rng)
{
    config.validate();

    std::vector<Bytes> payloads;
    std::size_t text_index = 0;
    for (const auto& c : config.schedule) {
        payloads.push_back(make_payload(config, c.media, c.media == MediaType::Text ? text_index++ : 0, rng));
    }

    std::map<std::string, Channel> channels;
    for (const auto& sc : config.scanners) {
        Channel ch{sc.name, config.base_database};
        if (config.seed_database) {
            for (std::size_t i = 0; i < payloads.size(); ++i) {
                const auto media = config.schedule[i].media;
                if (sc.exact) {
                    ch.db.add_exact_payload(payloads[i]);
                }
                if (sc.perceptual && media == MediaType::Image) {
                    ch.db.add_perceptual(dhash(parse_pgm(payloads[i])));
                }
                if (sc.keywords && media == MediaType::Text) {
                    std::string_view text(reinterpret_cast<const char*>(payloads[i].data()), payloads[i].size());
                    for (const auto& kw : extract_keywords(text)) {
                        ch.db.add_keyword(kw);
                    }
                }
            }
        }
        channels.emplace(sc.name, std::move(ch));
    }

    std::map<std::pair<std::string, std::string>, SecretKey> keys;
    auto key_for = [&](const std::string& a, const std::string& b) -> const SecretKey& {
        auto pair = std::minmax(a, b);
        auto it = keys.find({pair.first, pair.second});
        if (it == keys.end()) {
            it = keys.emplace(std::pair{pair.first, pair.second}, generate_key(rng)).first;
        }
        return it->second;
    };

    const auto& font = ocr::GlyphFont::standard();
    std::vector<EvalRow> rows;
    for (std::size_t i = 0; i < config.schedule.size(); ++i) {
        const auto& c = config.schedule[i];
        const auto& plaintext = payloads[i];
        EvalRow row{i + 1,
                    c.media,
                    Status::Failed,
                    c.sender,
                    c.channel,
                    c.receiver,
                    std::nullopt,
                    Status::Failed,
                    ScanVerdict::clean(),
                    std::nullopt,
                    std::nullopt};

        Bytes wire = plaintext;
        std::string armored;
        std::optional<SecretKey> key;
        if (config.encrypt) {
            key = key_for(c.sender, c.receiver);
            const auto env = encrypt(plaintext, c.media, *key, rng);
            row.encryption_status = Status::Successful;
            if (c.media == MediaType::Text) {
                armored = armor::encode(env.serialize());
                wire.assign(armored.begin(), armored.end());
            } else {
                wire = env.serialize();
            }
        }

        const auto report = channel_send(channels.at(c.channel), c.sender, c.receiver, c.media, wire);
        row.sender_verdict = report.sender_verdict;
        row.receiver_verdict = report.receiver_verdict;
        row.blocked_at = report.blocked_at;

        if (report.delivered() && key) {
            try {
                Decrypted out;
                if (c.media == MediaType::Text) {
                    const std::string received(report.delivered_payload.begin(), report.delivered_payload.end());
                    const auto frame = ocr::render_armored(received, font, config.render);
                    const ocr::TemplateRecognizer recognizer(font, config.render.scale);
                    const auto recognized = recognizer.recognize(frame);
                    row.ocr_accuracy = ocr::ocr_accuracy(armored, armor::strip_separators(recognized.text));
                    out = ocr::auto_decrypt(frame, *key, recognizer);
                } else {
                    out = decrypt(ByteView(report.delivered_payload), *key);
                }
                if (out.media == c.media && out.plaintext == plaintext) {
                    row.decryption_status = Status::Successful;
                }
            } catch (const Error&) {
                row.decryption_status = Status::Failed;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_table(const std::vector<EvalRow>& rows)
{
    const std::vector<std::string> header = {"Message No.", "Message Type", "Encryption Status", "Sender",
                                             "Channel", "Receiver", "Accuracy of OCR", "Decryption Status",
                                             "Delivery"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        std::string delivery = r.blocked_at ? "blocked at " + std::string(to_string(*r.blocked_at)) : "delivered";
        cells.push_back({std::to_string(r.message_no), std::string(to_string(r.media)),
                         std::string(to_string(r.encryption_status)), r.sender, r.channel, r.receiver,
                         accuracy_cell(r.ocr_accuracy), std::string(to_string(r.decryption_status)), delivery});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t k = 0; k < header.size(); ++k) {
        width[k] = header[k].size();
        for (const auto& row : cells) {
            width[k] = std::max(width[k], row[k].size());
        }
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        out << '|';
        for (std::size_t k = 0; k < row.size(); ++k) {
            out << ' ' << row[k] << std::string(width[k] - row[k].size(), ' ') << " |";
        }
        out << '\n';
    };
    auto rule = [&] {
        out << '+';
        for (auto w : width) {
            out << std::string(w + 2, '-') << '+';
        }
        out << '\n';
    };
    rule();
    emit(header);
    rule();
    for (const auto& row : cells) {
        emit(row);
    }
    rule();
    return out.str();
}

std::string to_json(const std::vector<EvalRow>& rows)
{
    auto verdict_json = [](const ScanVerdict& v) {
        nlohmann::ordered_json j;
        j["outcome"] = v.is_flagged() ? "Flagged" : "Clean";
        j["reason"] = v.reason ? nlohmann::ordered_json(*v.reason) : nlohmann::ordered_json(nullptr);
        return j;
    };
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["message_no"] = r.message_no;
        j["media"] = to_string(r.media);
        j["encryption_status"] = to_string(r.encryption_status);
        j["sender"] = r.sender;
        j["channel"] = r.channel;
        j["receiver"] = r.receiver;
        j["ocr_accuracy"] = r.ocr_accuracy ? nlohmann::ordered_json(*r.ocr_accuracy) : nlohmann::ordered_json(nullptr);
        j["decryption_status"] = to_string(r.decryption_status);
        j["sender_verdict"] = verdict_json(r.sender_verdict);
        j["receiver_verdict"] = r.receiver_verdict ? verdict_json(*r.receiver_verdict) : nlohmann::ordered_json(nullptr);
        j["blocked_at"] = r.blocked_at ? nlohmann::ordered_json(to_string(*r.blocked_at)) : nlohmann::ordered_json(nullptr);
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

} // namespace ekb::css
