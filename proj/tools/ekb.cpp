// ekb: encrypted-keyboard command-line tool.

#include <cctype>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "ekb/armor.hpp"
#include "ekb/attack.hpp"
#include "ekb/crypto.hpp"
#include "ekb/css.hpp"
#include "ekb/evaluation.hpp"
#include "ekb/keyring.hpp"
#include "ekb/ocr.hpp"

namespace fs = std::filesystem;
using namespace ekb;
using ekb::cli::CliConfig;

namespace {

struct Globals {
    std::optional<fs::path> settings;
    std::optional<fs::path> store_path;
    std::optional<fs::path> capture_path;
    std::optional<fs::path> scanner_db_path;
    std::optional<std::uint64_t> seed;

    // Flags override the settings file.
    CliConfig resolve() const
    {
        CliConfig cfg = settings ? CliConfig::load(*settings) : CliConfig{};
        if (store_path) cfg.store_path = store_path;
        if (capture_path) cfg.capture_path = capture_path;
        if (scanner_db_path) cfg.scanner_db_path = scanner_db_path;
        if (seed) cfg.seed = seed;
        return cfg;
    }
};

std::unique_ptr<RandomSource> make_rng(const CliConfig& cfg)
{
    if (cfg.seed) {
        return std::make_unique<SeededRng>(*cfg.seed);
    }
    return std::make_unique<SystemRng>();
}

std::uint64_t seed_or_fresh(const CliConfig& cfg)
{
    if (cfg.seed) {
        return *cfg.seed;
    }
    SystemRng rng;
    return rng.next_u64();
}

const fs::path& require(const std::optional<fs::path>& path, const char* key)
{
    if (!path) {
        throw Error(Errc::InvalidArgument, std::string(key) + " is not configured (use --settings or the matching flag)");
    }
    return *path;
}

keyring::ContactStore open_store(const fs::path& path)
{
    return fs::exists(path) ? keyring::ContactStore::load(path) : keyring::ContactStore{};
}

MediaType media_arg(const std::string& name)
{
    const auto media = parse_media_type(name);
    if (!media) {
        throw Error(Errc::InvalidArgument, "unknown media type '" + name + "'");
    }
    return *media;
}

// Armored text (hex plus separators, surrounding whitespace allowed) or raw
// envelope bytes.
Bytes envelope_bytes(const Bytes& input)
{
    std::string_view text(reinterpret_cast<const char*>(input.data()), input.size());
    const auto first = text.find_first_not_of(" \t\r\n");
    const auto last = text.find_last_not_of(" \t\r\n");
    if (first != std::string_view::npos) {
        const auto body = text.substr(first, last - first + 1);
        if (armor::is_armored(body)) {
            return armor::decode_strict(body);
        }
    }
    return input;
}

void emit_plaintext(const Decrypted& out, const std::optional<fs::path>& path)
{
    if (path) {
        cli::write_file(*path, out.plaintext);
        std::cout << "decrypted " << to_string(out.media) << " (" << out.plaintext.size() << " bytes) -> "
                  << path->string() << '\n';
        return;
    }
    if (out.media != MediaType::Text) {
        throw Error(Errc::InvalidArgument, "binary plaintext needs -o <file>");
    }
    std::cout.write(reinterpret_cast<const char*>(out.plaintext.data()),
                    static_cast<std::streamsize>(out.plaintext.size()));
}

void print_fingerprint(const keyring::Fingerprint& fp)
{
    const auto& words = fp.words();
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::cout << words[i] << ((i % 4 == 3) ? '\n' : ' ');
    }
}

int report_verification(const keyring::VerificationResult& result, const keyring::ValidationReport& recitation)
{
    for (const auto& f : recitation.findings) {
        std::cout << "recitation " << keyring::to_string(f.kind) << " at " << f.position;
        if (!f.word.empty()) {
            std::cout << ": " << f.word;
        }
        std::cout << '\n';
    }
    if (result.match) {
        std::cout << "Match\n";
    } else {
        std::cout << "Mismatch\n";
        for (const auto& d : result.differences) {
            std::cout << "  position " << d.position << ": expected '" << d.expected << "', heard '" << d.actual
                      << "'\n";
        }
    }
    return result.match && recitation.valid() ? cli::kOk : cli::kMismatch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Encrypted keyboard toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Globals g;
    app.add_option("--settings", g.settings, "key = value settings file");
    app.add_option("--store", g.store_path, "Contact store (JSON)");
    app.add_option("--capture", g.capture_path, "Screenshot file read by ocr-decrypt");
    app.add_option("--scanner-db", g.scanner_db_path, "Scanner database file");
    app.add_option("--seed", g.seed, "Seed for every randomized step");

    std::function<int()> action;

    // keygen
    auto* keygen = app.add_subcommand("keygen", "Generate a shared AES-128 key (hex)");
    std::optional<fs::path> keygen_out;
    keygen->add_option("-o,--output", keygen_out, "Write the key here instead of stdout");
    keygen->callback([&] {
        action = [&] {
            const auto cfg = g.resolve();
            const auto key = generate_key(*make_rng(cfg));
            if (keygen_out) {
                cli::write_file(*keygen_out, as_bytes(key.to_hex() + "\n"));
            } else {
                std::cout << key.to_hex() << '\n';
            }
            return cli::kOk;
        };
    });

    // fingerprint
    auto* fingerprint = app.add_subcommand("fingerprint", "Spoken fingerprints of public keys");
    fingerprint->require_subcommand(1);
    fs::path fp_key;
    fs::path fp_transcript;
    auto* fp_gen = fingerprint->add_subcommand("gen", "Print the 32-word fingerprint");
    fp_gen->add_option("pubkey", fp_key, "Public key file (raw bytes)")->required();
    fp_gen->callback([&] {
        action = [&] {
            print_fingerprint(keyring::generate_fingerprint(cli::read_file(fp_key), keyring::load_wordlist()));
            return cli::kOk;
        };
    });
    auto* fp_verify = fingerprint->add_subcommand("verify", "Compare a transcript with the fingerprint");
    fp_verify->add_option("pubkey", fp_key, "Public key file (raw bytes)")->required();
    fp_verify->add_option("transcript", fp_transcript, "Transcript text")->required();
    fp_verify->callback([&] {
        action = [&] {
            const auto& wl = keyring::load_wordlist();
            const auto transcript = keyring::Transcript::from_text(cli::read_text(fp_transcript), fp_transcript.string());
            return report_verification(keyring::verify_fingerprint(cli::read_file(fp_key), transcript, wl),
                                       keyring::validate_recitation(transcript.words, wl));
        };
    });

    // contact
    auto* contact = app.add_subcommand("contact", "Manage the contact store");
    contact->require_subcommand(1);
    std::string contact_name;
    fs::path contact_file;
    std::string contact_key_hex;
    bool speaker_attested = false;
    bool list_json = false;

    auto* c_add = contact->add_subcommand("add", "Add a contact with its public key");
    c_add->add_option("name", contact_name)->required();
    c_add->add_option("pubkey", contact_file, "Public key file (raw bytes)")->required();
    c_add->callback([&] {
        action = [&] {
            const auto path = require(g.resolve().store_path, "store_path");
            auto store = open_store(path);
            store.add_contact(contact_name, cli::read_file(contact_file));
            store.save(path);
            std::cout << "added " << contact_name << '\n';
            return cli::kOk;
        };
    });

    auto* c_verify = contact->add_subcommand("verify", "Verify a contact from a recited transcript");
    c_verify->add_option("name", contact_name)->required();
    c_verify->add_option("transcript", contact_file, "Transcript text")->required();
    c_verify->add_flag("--speaker-attested", speaker_attested, "The voice was recognized as the contact's");
    c_verify->callback([&] {
        action = [&] {
            const auto path = require(g.resolve().store_path, "store_path");
            auto store = open_store(path);
            const auto& wl = keyring::load_wordlist();
            const auto transcript = keyring::Transcript::from_text(cli::read_text(contact_file), contact_file.string());
            const auto result = store.verify_contact(contact_name, transcript, wl, speaker_attested);
            store.save(path);
            return report_verification(result, keyring::validate_recitation(transcript.words, wl));
        };
    });

    auto* c_set_key = contact->add_subcommand("set-key", "Attach a shared key to a verified contact");
    c_set_key->add_option("name", contact_name)->required();
    auto* key_opt = c_set_key->add_option("--key", contact_key_hex, "Key as 32 hex digits");
    auto* key_file_opt = c_set_key->add_option("--key-file", contact_file, "File holding the hex key");
    key_opt->excludes(key_file_opt);
    c_set_key->callback([&] {
        action = [&] {
            const auto path = require(g.resolve().store_path, "store_path");
            if (key_opt->count() == 0 && key_file_opt->count() == 0) {
                throw Error(Errc::InvalidArgument, "set-key needs --key or --key-file");
            }
            std::string hex = key_opt->count() ? contact_key_hex : cli::read_text(contact_file);
            while (!hex.empty() && std::isspace(static_cast<unsigned char>(hex.back()))) {
                hex.pop_back();
            }
            auto store = open_store(path);
            store.set_shared_key(contact_name, SecretKey::from_hex(hex));
            store.save(path);
            std::cout << "shared key set for " << contact_name << '\n';
            return cli::kOk;
        };
    });

    auto* c_list = contact->add_subcommand("list", "List contacts");
    c_list->add_flag("--json", list_json, "Print the store document");
    c_list->callback([&] {
        action = [&] {
            const auto store = open_store(require(g.resolve().store_path, "store_path"));
            if (list_json) {
                std::cout << store.to_json() << '\n';
                return cli::kOk;
            }
            for (const auto& c : store.contacts()) {
                std::cout << c.name << "\tverified=" << (c.fingerprint_verified ? "yes" : "no")
                          << "\tspeaker=" << (c.speaker_attested ? "yes" : "no")
                          << "\tshared_key=" << (c.shared_key ? "yes" : "no") << '\n';
            }
            return cli::kOk;
        };
    });

    // encrypt / decrypt
    std::string peer;
    std::string media_name = "text";
    fs::path input;
    std::optional<fs::path> output;
    bool armored = false;

    auto* enc = app.add_subcommand("encrypt", "Encrypt a file for a contact");
    enc->add_option("--to", peer, "Contact name")->required();
    enc->add_option("--type", media_name, "text, image, audio, voice-memo or video")->required();
    enc->add_option("input", input, "Plaintext file")->required();
    enc->add_flag("--armor", armored, "Emit hex text instead of envelope bytes");
    enc->add_option("-o,--output", output, "Output file");
    enc->callback([&] {
        action = [&] {
            const auto cfg = g.resolve();
            const auto store = open_store(require(cfg.store_path, "store_path"));
            const auto& key = store.get_shared_key(peer);
            const auto media = media_arg(media_name);
            const auto wire = encrypt(cli::read_file(input), media, key, *make_rng(cfg)).serialize();
            if (armored) {
                const auto text = armor::encode(wire) + "\n";
                if (output) {
                    cli::write_file(*output, as_bytes(text));
                } else {
                    std::cout << text;
                }
            } else {
                if (!output) {
                    throw Error(Errc::InvalidArgument, "binary envelopes need -o <file>; or pass --armor");
                }
                cli::write_file(*output, wire);
            }
            return cli::kOk;
        };
    });

    auto* dec = app.add_subcommand("decrypt", "Decrypt an envelope (binary or armored) from a contact");
    dec->add_option("--from", peer, "Contact name")->required();
    dec->add_option("input", input, "Envelope file")->required();
    dec->add_option("-o,--output", output, "Plaintext output file");
    dec->callback([&] {
        action = [&] {
            const auto store = open_store(require(g.resolve().store_path, "store_path"));
            emit_plaintext(decrypt(envelope_bytes(cli::read_file(input)), store.get_shared_key(peer)), output);
            return cli::kOk;
        };
    });

    // render / ocr-decrypt
    std::size_t scale = 1;
    std::size_t wrap_width = 64;
    auto* render = app.add_subcommand("render", "Render armored text as a screenshot (PGM)");
    render->add_option("input", input, "Armored text file")->required();
    render->add_option("-o,--output", output, "PGM output")->required();
    render->add_option("--scale", scale, "Pixels per glyph cell")->check(CLI::PositiveNumber);
    render->add_option("--wrap-width", wrap_width, "Characters per line")->check(CLI::PositiveNumber);
    render->callback([&] {
        action = [&] {
            auto text = cli::read_text(input);
            while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
                text.pop_back();
            }
            write_pgm(*output, ocr::render_armored(text, ocr::GlyphFont::standard(), {scale, wrap_width}));
            return cli::kOk;
        };
    });

    std::optional<fs::path> image_path;
    auto* ocr_dec = app.add_subcommand("ocr-decrypt", "Recognize a screenshot and decrypt the first envelope");
    ocr_dec->add_option("--from", peer, "Contact name")->required();
    ocr_dec->add_option("image", image_path, "PGM screenshot (default: capture_path)");
    ocr_dec->add_option("--scale", scale, "Scale the image was rendered at")->check(CLI::PositiveNumber);
    ocr_dec->add_option("-o,--output", output, "Plaintext output file");
    ocr_dec->callback([&] {
        action = [&] {
            const auto cfg = g.resolve();
            const auto store = open_store(require(cfg.store_path, "store_path"));
            const auto& key = store.get_shared_key(peer);
            ocr::FileCaptureSource source(image_path ? *image_path : require(cfg.capture_path, "capture_path"));
            const auto out = ocr::auto_decrypt(source.latest_frame(), key, ocr::GlyphFont::standard(), scale);
            emit_plaintext(out, output);
            return cli::kOk;
        };
    });

    // scan / scan-db
    auto* scan_cmd = app.add_subcommand("scan", "Run the client-side scanner on a payload");
    scan_cmd->add_option("--type", media_name, "Media type of the payload")->required();
    scan_cmd->add_option("input", input, "Payload file")->required();
    scan_cmd->callback([&] {
        action = [&] {
            const auto db = css::ScanDatabase::load(require(g.resolve().scanner_db_path, "scanner_db_path"));
            const auto verdict = css::scan(db, media_arg(media_name), cli::read_file(input));
            if (verdict.is_flagged()) {
                std::cout << "Flagged: " << verdict.reason.value_or("") << '\n';
                return cli::kBlocked;
            }
            std::cout << "Clean\n";
            return cli::kOk;
        };
    });

    auto* scan_db = app.add_subcommand("scan-db", "Maintain the scanner database");
    scan_db->require_subcommand(1);
    auto* db_add = scan_db->add_subcommand("add", "Register a known payload (hash, keywords, perceptual hash)");
    db_add->add_option("--type", media_name, "Media type of the payload")->required();
    db_add->add_option("input", input, "Payload file")->required();
    db_add->callback([&] {
        action = [&] {
            const auto path = require(g.resolve().scanner_db_path, "scanner_db_path");
            auto db = fs::exists(path) ? css::ScanDatabase::load(path) : css::ScanDatabase{};
            const auto payload = cli::read_file(input);
            const auto media = media_arg(media_name);
            db.add_exact_payload(payload);
            if (media == MediaType::Text) {
                for (const auto& kw : css::extract_keywords({reinterpret_cast<const char*>(payload.data()), payload.size()})) {
                    db.add_keyword(kw);
                }
            } else if (media == MediaType::Image) {
                db.add_perceptual(css::dhash(parse_pgm(payload)));
            }
            db.save(path);
            return cli::kOk;
        };
    });

    // simulate
    std::optional<fs::path> sim_config;
    bool json_out = false;
    auto* simulate = app.add_subcommand("simulate", "Run the simulated messaging matrix");
    simulate->add_option("--config", sim_config, "Evaluation config (default: built-in 15-case matrix)");
    simulate->add_flag("--json", json_out, "Print rows as JSON");
    simulate->callback([&] {
        action = [&] {
            const auto cfg = g.resolve();
            const auto eval = sim_config ? css::EvaluationConfig::parse(cli::read_text(*sim_config))
                                         : css::EvaluationConfig::table_default();
            const auto rows = css::run_evaluation(eval, *make_rng(cfg));
            std::cout << (json_out ? css::to_json(rows) + "\n" : css::format_table(rows));
            for (const auto& r : rows) {
                if (r.blocked_at) {
                    return cli::kBlocked;
                }
            }
            return cli::kOk;
        };
    });

    // analyze reorder
    auto* analyze = app.add_subcommand("analyze", "Attack analysis");
    analyze->require_subcommand(1);
    attack::ReorderParams params;
    std::uint64_t trials = 0;
    auto* reorder = analyze->add_subcommand("reorder", "Word-reordering attack probabilities");
    reorder->add_option("--dict", params.dict_size, "Words per parity list")->capture_default_str();
    reorder->add_option("--words", params.words_per_fp, "Words per parity in one fingerprint")->capture_default_str();
    reorder->add_option("--keys", params.num_keys, "Fingerprints the attacker has heard")->capture_default_str();
    reorder->add_option("--trials", trials, "Monte Carlo trials (0 skips)");
    reorder->add_flag("--json", json_out, "Print the report as JSON");
    reorder->callback([&] {
        action = [&] {
            const auto report = attack::discrepancy_report(params, trials, seed_or_fresh(g.resolve()));
            std::cout << (json_out ? attack::to_json(report) + "\n" : attack::format_report(report));
            return cli::kOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << e.what() << '\n' << cli::error_line("Usage", cli::kUsage, e.what()) << '\n';
        return cli::kUsage;
    }

    try {
        return action ? action() : cli::kUsage;
    } catch (const Error& e) {
        const int code = cli::exit_code_for(e.code());
        std::cerr << "error: " << e.what() << '\n' << cli::error_line(to_string(e.code()), code, e.what()) << '\n';
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n' << cli::error_line("Internal", cli::kIo, e.what()) << '\n';
        return cli::kIo;
    }
}
